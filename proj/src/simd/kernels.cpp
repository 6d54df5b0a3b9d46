#include "varsel/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "varsel/errors.hpp"

namespace varsel::simd {

namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::axpy, &scalar::sum_squares};
#if defined(VARSEL_HAVE_AVX2)
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::axpy, &avx2::sum_squares};
#endif

bool detect_avx2() noexcept {
#if defined(VARSEL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

bool cpu_has_avx2() noexcept {
    static const bool has = detect_avx2();
    return has;
}

Backend initial_backend() noexcept {
    if (const char* env = std::getenv("VARSEL_SIMD")) {
        if (std::string(env) == "scalar") return Backend::Scalar;
    }
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{initial_backend()};
    return b;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b)
        throw DimensionMismatch("kernel operands differ in length: " + std::to_string(a) +
                                " vs " + std::to_string(b));
}

}  // namespace

bool backend_available(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return true;
        case Backend::Avx2: return cpu_has_avx2();
    }
    return false;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (!backend_available(b))
        throw ConfigError("SIMD backend '" + std::string(backend_name(b)) +
                          "' is not available on this CPU");
    current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& kernels(Backend b) {
    if (!backend_available(b))
        throw ConfigError("SIMD backend '" + std::string(backend_name(b)) +
                          "' is not available on this CPU");
#if defined(VARSEL_HAVE_AVX2)
    if (b == Backend::Avx2) return kAvx2Table;
#endif
    (void)b;
    return kScalarTable;
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return kernels(active_backend()).dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    check_sizes(x.size(), y.size());
    kernels(active_backend()).axpy(alpha, x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) {
    return kernels(active_backend()).sum_squares(x.data(), x.size());
}

}  // namespace varsel::simd
