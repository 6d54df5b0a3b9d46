#pragma once

#include <span>
#include <vector>

#include "varsel/matrix.hpp"

namespace varsel {

/// In-place Cholesky factorization A = L L^T of a symmetric matrix; only the
/// lower triangle is read and it is overwritten by L. Returns false when a
/// pivot is not strictly positive and finite.
bool cholesky_factor(Matrix& a);

/// Solves L L^T x = b given the factor from cholesky_factor.
std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b);

}  // namespace varsel
