#ifndef ASDTORIC_JOYCE_HPP
#define ASDTORIC_JOYCE_HPP

// Closed-form torus-symmetric solutions (P, Q) of
//     P_x = Q_y,   P_y + Q_x = P / y
// on the upper half plane {y > 0}, built from elementary solutions attached to
// boundary points zeta in R u {inf}:
//     Q + iP = (1/4pi) sum_j f^{zeta_j}(x, y) w_j,
//     f^zeta = ((x - zeta) + iy) / |(x - zeta) + iy|.

#include "errors.hpp"
#include "jet.hpp"
#include "lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace asdtoric {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Boundary points: zetas[0] is +inf, the rest strictly increasing reals.
struct ConformalData {
    std::vector<double> zetas;

    std::size_t size() const { return zetas.size(); }

    /// Conformal data {inf, finite...}.
    static ConformalData from_finite(const std::vector<double>& finite)
    {
        ConformalData c;
        c.zetas.reserve(finite.size() + 1);
        c.zetas.push_back(kInf);
        c.zetas.insert(c.zetas.end(), finite.begin(), finite.end());
        return c;
    }
};

/// Throws ValidationError unless conf is well formed for a fan with k rays.
inline void validate_conformal(const ConformalData& conf, std::size_t k)
{
    if (conf.zetas.empty() || !(std::isinf(conf.zetas[0]) && conf.zetas[0] > 0))
        throw ValidationError("conformal data must start with inf");
    if (conf.zetas.size() != k)
        throw ValidationError("conformal data has " + std::to_string(conf.zetas.size()) + " points, fan has "
                              + std::to_string(k) + " rays");
    for (std::size_t i = 1; i < conf.zetas.size(); ++i) {
        if (!std::isfinite(conf.zetas[i])) throw ValidationError("only the first boundary point may be infinite");
        if (i >= 2 && !(conf.zetas[i - 1] < conf.zetas[i]))
            throw ValidationError("boundary points must be strictly increasing");
    }
}

// --- elementary solution --------------------------------------------------

/// f^zeta as real and imaginary jets.
struct ComplexJet {
    Jet2 re;
    Jet2 im;
};

inline ComplexJet boundary_function_jet(double zeta, double x, double y)
{
    if (std::isinf(zeta)) return {Jet2::constant(1.0), Jet2::constant(0.0)};
    const double X = x - zeta;
    const double r2 = X * X + y * y;
    if (r2 == 0.0) throw DomainError("elementary solution evaluated at its boundary point");
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    const double r5 = r3 * r2;

    ComplexJet f;
    f.re.v = X / r;
    f.re.d = {y * y / r3, -X * y / r3};
    f.re.h[0][0] = -3.0 * X * y * y / r5;
    f.re.h[0][1] = f.re.h[1][0] = y * (2.0 * X * X - y * y) / r5;
    f.re.h[1][1] = X * (2.0 * y * y - X * X) / r5;

    f.im.v = y / r;
    f.im.d = {-X * y / r3, X * X / r3};
    f.im.h[0][0] = y * (2.0 * X * X - y * y) / r5;
    f.im.h[0][1] = f.im.h[1][0] = X * (2.0 * y * y - X * X) / r5;
    f.im.h[1][1] = -3.0 * X * X * y / r5;
    return f;
}

inline Complex boundary_function_value(double zeta, double x, double y)
{
    if (std::isinf(zeta)) return {1.0, 0.0};
    const double X = x - zeta;
    const double r = std::hypot(X, y);
    if (r == 0.0) throw DomainError("elementary solution evaluated at its boundary point");
    return {X / r, y / r};
}

// --- weights ----------------------------------------------------------------

enum class WeightConvention { offsets, perp };

inline std::string to_string(WeightConvention w) { return w == WeightConvention::offsets ? "offsets" : "perp"; }

inline std::vector<LatticeVector> solution_weights(const FanData& fan, WeightConvention w)
{
    if (w == WeightConvention::offsets) return derive_offsets(fan).offsets;
    std::vector<LatticeVector> out;
    out.reserve(fan.size());
    for (const auto& u : fan.rays) out.push_back(perp(u));
    return out;
}

// --- solution -------------------------------------------------------------

struct SolutionJet {
    double x = 0.0;
    double y = 0.0;
    std::array<Jet2, 2> P;
    std::array<Jet2, 2> Q;

    /// P1 Q2 - P2 Q1 with derivatives.
    Jet2 determinant() const { return P[0] * Q[1] - P[1] * Q[0]; }
};

inline constexpr double kMinJetHeight = 1e-8;

inline SolutionJet solution_jet(const FanData& fan, const ConformalData& conf, double x, double y,
                                WeightConvention weights = WeightConvention::offsets)
{
    if (!(y > 0.0)) throw DomainError("solution jet requires y > 0");
    if (y < kMinJetHeight) throw DomainError("solution jet refused below y = 1e-8");
    validate_conformal(conf, fan.size());
    const auto w = solution_weights(fan, weights);
    const double scale = 1.0 / (4.0 * std::numbers::pi);

    SolutionJet s;
    s.x = x;
    s.y = y;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const ComplexJet f = boundary_function_jet(conf.zetas[j], x, y);
        const double wa = scale * static_cast<double>(w[j].a);
        const double wb = scale * static_cast<double>(w[j].b);
        s.Q[0] += f.re * wa;
        s.Q[1] += f.re * wb;
        s.P[0] += f.im * wa;
        s.P[1] += f.im * wb;
    }
    return s;
}

struct SolutionValue {
    std::array<double, 2> P{};
    std::array<double, 2> Q{};
};

/// Values only; y = 0 is allowed away from the boundary points.
inline SolutionValue solution_value(const FanData& fan, const ConformalData& conf, double x, double y,
                                    WeightConvention weights = WeightConvention::offsets)
{
    if (y < 0.0) throw DomainError("solution requires y >= 0");
    validate_conformal(conf, fan.size());
    const auto w = solution_weights(fan, weights);
    const double scale = 1.0 / (4.0 * std::numbers::pi);
    SolutionValue s;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const Complex f = boundary_function_value(conf.zetas[j], x, y);
        s.Q[0] += scale * f.real() * static_cast<double>(w[j].a);
        s.Q[1] += scale * f.real() * static_cast<double>(w[j].b);
        s.P[0] += scale * f.imag() * static_cast<double>(w[j].a);
        s.P[1] += scale * f.imag() * static_cast<double>(w[j].b);
    }
    return s;
}

struct PdeResidual {
    std::array<double, 2> r1{}; // P_x - Q_y
    std::array<double, 2> r2{}; // P_y + Q_x - P/y

    double max_abs() const
    {
        return std::max({std::abs(r1[0]), std::abs(r1[1]), std::abs(r2[0]), std::abs(r2[1])});
    }
};

inline PdeResidual pde_residual(const SolutionJet& s)
{
    PdeResidual r;
    for (int c = 0; c < 2; ++c) {
        r.r1[c] = s.P[c].d[0] - s.Q[c].d[1];
        r.r2[c] = s.P[c].d[1] + s.Q[c].d[0] - s.P[c].v / s.y;
    }
    return r;
}

inline double torus_determinant(const SolutionJet& s) { return s.P[0].v * s.Q[1].v - s.P[1].v * s.Q[0].v; }

// --- Cayley map and special points ---------------------------------------

/// zeta in the upper half plane -> a in the unit disc.
inline Complex cayley_to_disc(Complex zeta) { return (zeta - Complex(0, 1)) / (zeta + Complex(0, 1)); }

/// Inverse: a -> -i (a + 1) / (a - 1).
inline Complex cayley_from_disc(Complex a) { return Complex(0, -1) * (a + 1.0) / (a - 1.0); }

/// Unit-circle points z_j with z_j^2 = (zeta_j - i)/(zeta_j + i), z_1 = 1, args increasing in [0, pi).
inline std::vector<Complex> special_points_on_line(const ConformalData& conf)
{
    std::vector<Complex> z;
    z.reserve(conf.size());
    for (double zeta : conf.zetas) {
        if (std::isinf(zeta))
            z.emplace_back(1.0, 0.0);
        else
            z.push_back(std::polar(1.0, std::atan2(1.0, -zeta)));
    }
    return z;
}

// --- boundary behaviour ---------------------------------------------------

/// Open interval of the boundary segment with 0-based index m: segment m has
/// stabilizer u_{m+1} = fan.ray(m) and runs between consecutive boundary points
/// (-inf for m = 0 and +inf for m = k-1).
inline std::pair<double, double> boundary_segment(const ConformalData& conf, std::size_t m)
{
    const std::size_t k = conf.size();
    if (m >= k) throw ValidationError("segment index out of range");
    const double lo = m == 0 ? -kInf : conf.zetas[m];
    const double hi = m + 1 >= k ? kInf : conf.zetas[m + 1];
    return {lo, hi};
}

inline double segment_sample(const ConformalData& conf, std::size_t m)
{
    const auto [lo, hi] = boundary_segment(conf, m);
    if (std::isinf(lo) && std::isinf(hi)) return 0.0;
    if (std::isinf(lo)) return hi - 1.0;
    if (std::isinf(hi)) return lo + 1.0;
    return 0.5 * (lo + hi);
}

struct DegeneracyResult {
    std::array<double, 2> limit{}; // lim_{y->0} Q(x, y)
    double angle = 0.0;            // angle between the limit line and u_m, in [0, pi/2]
    bool parallel = false;
    double extrapolation_error = 0.0;
};

/// Heights 0.1 d 2^-n, n = 0..7, with d the distance to the nearest boundary point (at most 1).
inline std::vector<double> default_height_sequence(double d = 1.0)
{
    std::vector<double> ys;
    for (int n = 0; n < 8; ++n) ys.push_back(0.1 * std::min(d, 1.0) * std::ldexp(1.0, -n));
    return ys;
}

/// Richardson (Neville) extrapolation of Q(x, y) to y = 0 in the variable y^2.
inline DegeneracyResult boundary_degeneracy_direction(const FanData& fan, const ConformalData& conf, std::size_t m,
                                                      std::optional<double> x = std::nullopt,
                                                      std::vector<double> ys = {},
                                                      WeightConvention weights = WeightConvention::offsets,
                                                      double angle_tol = 1e-6, double convergence_tol = 1e-9)
{
    validate_conformal(conf, fan.size());
    const auto [lo, hi] = boundary_segment(conf, m);
    const double xs = x.value_or(segment_sample(conf, m));
    if (!(xs > lo && xs < hi)) throw ValidationError("sample x is not inside the segment");
    if (ys.empty()) ys = default_height_sequence(std::min(xs - lo, hi - xs));
    if (ys.size() < 2) throw ValidationError("need at least two heights");

    const std::size_t n = ys.size();
    std::array<double, 2> limit{};
    double err = 0.0;
    for (int c = 0; c < 2; ++c) {
        std::vector<double> t(n), h2(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = solution_value(fan, conf, xs, ys[i], weights).Q[c];
            h2[i] = ys[i] * ys[i];
        }
        double prev = t[n - 1];
        double last_change = std::numeric_limits<double>::infinity();
        for (std::size_t level = 1; level < n; ++level) {
            for (std::size_t i = 0; i + level < n; ++i)
                t[i] = (h2[i] * t[i + 1] - h2[i + level] * t[i]) / (h2[i] - h2[i + level]);
            last_change = std::abs(t[0] - prev);
            prev = t[0];
        }
        limit[c] = t[0];
        err = std::max(err, last_change);
    }
    const double scale = std::max(1.0, std::hypot(limit[0], limit[1]));
    if (!(err <= convergence_tol * scale) || !std::isfinite(limit[0]) || !std::isfinite(limit[1]))
        throw ConvergenceError("boundary limit did not converge (change " + std::to_string(err) + ")");

    DegeneracyResult out;
    out.limit = limit;
    out.extrapolation_error = err;
    const LatticeVector u = fan.ray(m);
    const double ua = static_cast<double>(u.a), ub = static_cast<double>(u.b);
    const double norm = std::hypot(limit[0], limit[1]) * std::hypot(ua, ub);
    if (norm == 0.0) {
        out.angle = std::numbers::pi / 2;
    } else {
        const double cross = std::abs(limit[0] * ub - limit[1] * ua);
        const double dotp = std::abs(limit[0] * ua + limit[1] * ub);
        out.angle = std::atan2(cross, dotp);
    }
    out.parallel = out.angle < angle_tol;
    return out;
}

} // namespace asdtoric

#endif // ASDTORIC_JOYCE_HPP
