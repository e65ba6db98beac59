#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsym {

/// Tolerance for probability comparisons (row sums, profile identification).
inline constexpr double eps_p = 1e-9;
/// Tolerance for matrix residuals (unitarity, orthonormality, projections).
inline constexpr double eps_m = 1e-10;
/// Tolerance for positive-semidefiniteness of fitted density operators.
inline constexpr double eps_psd = 1e-8;

using cplx = std::complex<double>;

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline bool approx_eq(double a, double b, double tol = eps_p) {
    return std::abs(a - b) <= tol;
}

inline bool profile_eq(const std::vector<double>& a, const std::vector<double>& b,
                       double tol = eps_p) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

/// Pointwise dominance a <= b within tol.
inline bool profile_leq(const std::vector<double>& a, const std::vector<double>& b,
                        double tol = eps_p) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i] + tol) return false;
    return true;
}

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace qsym
