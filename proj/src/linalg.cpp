#include "varsel/linalg.hpp"

#include <cmath>

#include "varsel/errors.hpp"
#include "varsel/simd/kernels.hpp"

namespace varsel {

bool cholesky_factor(Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("cholesky needs a square matrix");
    for (std::size_t j = 0; j < n; ++j) {
        const auto lj = a.row(j).first(j);
        const double diag = a(j, j) - simd::dot(lj, lj);
        if (!(diag > 0.0) || !std::isfinite(diag)) return false;
        const double ljj = std::sqrt(diag);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i)
            a(i, j) = (a(i, j) - simd::dot(a.row(i).first(j), lj)) / ljj;
    }
    return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const std::size_t n = l.rows();
    if (b.size() != n) throw DimensionMismatch("cholesky_solve right-hand side has wrong length");
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        const double s = simd::dot(l.row(i).first(i), std::span<const double>(x).first(i));
        x[i] = (x[i] - s) / l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

}  // namespace varsel
