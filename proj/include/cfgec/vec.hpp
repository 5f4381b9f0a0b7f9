#ifndef CFGEC_VEC_HPP
#define CFGEC_VEC_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cfgec {

using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("vector dimension mismatch: " +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    }
}

inline bool all_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline Vec add(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(const Vec& a, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

// a + s*b
inline Vec axpy(const Vec& a, double s, const Vec& b) {
    check_same_dim(a, b);
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
}

inline double dot(const Vec& a, const Vec& b) {
    check_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Cosine similarity clamped to [-1, 1]; empty when either norm is at or
/// below the degenerate guard.
inline std::optional<double> cosine_similarity(const Vec& a, const Vec& b,
                                               double eps_norm = 1e-12) {
    double na = norm(a), nb = norm(b);
    if (na <= eps_norm || nb <= eps_norm) return std::nullopt;
    double s = dot(a, b) / (na * nb);
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    return s;
}

/// B minus its projection onto A. Empty when ||A|| is degenerate.
inline std::optional<Vec> gram_schmidt_reject(const Vec& A, const Vec& B,
                                              double eps_norm = 1e-12) {
    check_same_dim(A, B);
    double aa = dot(A, A);
    if (std::sqrt(aa) <= eps_norm) return std::nullopt;
    double c = dot(A, B) / aa;
    return axpy(B, -c, A);
}

}  // namespace cfgec

#endif
