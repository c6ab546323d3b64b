#ifndef ASDTORIC_TWISTOR_HPP
#define ASDTORIC_TWISTOR_HPP

// Twistor-side data of a toric ASD orbifold.
//
//   psi(w) = prod_i ((w + w_i)/(w - w_i))^{v_i}          (componentwise, integer exponents)
//   w^2    = F(z^2) = c (z^2 - a)/(z^2 - b),  c = (1 - b)/(1 - a)
//   (b - a) A = (1/4pi) sum v_i / w_i,   (b - a) B = (1/4pi) sum v_i w_i
//
// On the real line b = 1/conj(a) the Joyce pair at zeta = -i(a+1)/(a-1) is
// Q + iP = (b - a) B.

#include "errors.hpp"
#include "joyce.hpp"
#include "lattice.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace asdtoric {

using Complex2 = std::array<Complex, 2>;

struct TorusFactor {
    Complex z;
    LatticeVector v;
};

struct MeromorphicTorusMap {
    std::vector<TorusFactor> factors;
};

/// z^n for integer n by repeated squaring.
inline Complex ipow(Complex z, std::int64_t n)
{
    if (n < 0) return 1.0 / ipow(z, -n);
    Complex result{1.0, 0.0};
    while (n > 0) {
        if (n & 1) result *= z;
        z *= z;
        n >>= 1;
    }
    return result;
}

inline constexpr double kUnitTolerance = 1e-12;

struct MapValidation {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Unit modulus, arg z_1 = 0, args strictly increasing in [0, pi), even exponent sum.
inline MapValidation validate_map(const MeromorphicTorusMap& map)
{
    MapValidation r;
    if (map.factors.empty()) r.violations.push_back("map has no factors");
    double prev = -1.0;
    LatticeVector sum{};
    for (std::size_t i = 0; i < map.factors.size(); ++i) {
        const auto& f = map.factors[i];
        sum = sum + f.v;
        if (std::abs(std::abs(f.z) - 1.0) > kUnitTolerance)
            r.violations.push_back("factor " + std::to_string(i + 1) + " is off the unit circle");
        const double arg = std::arg(f.z);
        if (i == 0 && std::abs(arg) > kUnitTolerance) r.violations.push_back("first special point is not 1");
        if (i > 0 && !(arg > prev && arg < std::numbers::pi))
            r.violations.push_back("special point args are not strictly increasing in [0, pi) at factor "
                                   + std::to_string(i + 1));
        prev = arg;
    }
    if (sum.a % 2 != 0 || sum.b % 2 != 0) r.violations.push_back("exponent sum is not even");
    return r;
}

/// As above, and the exponents telescope to 2 u_k.
inline MapValidation validate_map(const MeromorphicTorusMap& map, const FanData& fan)
{
    auto r = validate_map(map);
    LatticeVector sum{};
    for (const auto& f : map.factors) sum = sum + f.v;
    if (sum != fan.rays.back() * 2) r.violations.push_back("exponent sum differs from twice the last ray");
    return r;
}

inline MeromorphicTorusMap build_map(const FanData& fan, const ConformalData& conf)
{
    validate_conformal(conf, fan.size());
    const auto v = derive_offsets(fan).offsets;
    const auto z = special_points_on_line(conf);
    MeromorphicTorusMap map;
    for (std::size_t i = 0; i < v.size(); ++i) map.factors.push_back({z[i], v[i]});
    const auto check = validate_map(map, fan);
    if (!check.ok()) throw ValidationError("torus map invariant violated: " + check.violations.front());
    return map;
}

/// Evaluates psi at z. Throws PoleError at z = +-z_i.
inline Complex2 psi_eval(const MeromorphicTorusMap& map, Complex z)
{
    Complex2 out{Complex(1.0, 0.0), Complex(1.0, 0.0)};
    for (std::size_t i = 0; i < map.factors.size(); ++i) {
        const auto& f = map.factors[i];
        const Complex num = z + f.z;
        const Complex den = z - f.z;
        if (den == Complex(0.0, 0.0))
            throw PoleError("psi evaluated at special point " + std::to_string(i + 1), i, {f.v.a, f.v.b});
        if (num == Complex(0.0, 0.0))
            throw PoleError("psi evaluated at the antipode of special point " + std::to_string(i + 1), i,
                            {-f.v.a, -f.v.b});
        const Complex m = num / den;
        out[0] *= ipow(m, f.v.a);
        out[1] *= ipow(m, f.v.b);
    }
    return out;
}

struct DivisorPoint {
    Complex point;
    std::array<std::int64_t, 2> pole_order; // negative entries are zeros
};

/// Poles at z_i of order v_i and zeros at -z_i of order v_i, 2k points.
inline std::vector<DivisorPoint> divisor(const MeromorphicTorusMap& map)
{
    std::vector<DivisorPoint> out;
    for (const auto& f : map.factors) {
        out.push_back({f.z, {f.v.a, f.v.b}});
        out.push_back({-f.z, {-f.v.a, -f.v.b}});
    }
    return out;
}

/// Total zero order minus pole order per component.
inline std::array<std::int64_t, 2> degree_balance(const MeromorphicTorusMap& map)
{
    std::array<std::int64_t, 2> total{};
    for (const auto& d : divisor(map)) {
        total[0] += d.pole_order[0];
        total[1] += d.pole_order[1];
    }
    return total;
}

/// Pole order of each component at `center`, fitted as minus the slope of the
/// circle-mean of log|psi| between radii r1 and r2. The circle mean removes the
/// regular part exactly (mean value property), leaving -order * log r.
inline std::array<double, 2> fitted_pole_order(const MeromorphicTorusMap& map, Complex center, double r1 = 1e-2,
                                               double r2 = 1e-3, int samples = 64)
{
    auto mean_log = [&](double r) {
        std::array<double, 2> acc{};
        for (int s = 0; s < samples; ++s) {
            const auto p = psi_eval(map, center + std::polar(r, 2.0 * std::numbers::pi * (s + 0.5) / samples));
            acc[0] += std::log(std::abs(p[0]));
            acc[1] += std::log(std::abs(p[1]));
        }
        return std::array<double, 2>{acc[0] / samples, acc[1] / samples};
    };
    const auto l1 = mean_log(r1);
    const auto l2 = mean_log(r2);
    const double dlr = std::log(r2) - std::log(r1);
    return {-(l2[0] - l1[0]) / dlr, -(l2[1] - l1[1]) / dlr};
}

// --- twistor lines ------------------------------------------------------------

/// Principal line parameters; b = nullopt encodes b = infinity.
struct LinePair {
    Complex a;
    std::optional<Complex> b;
};

/// Real line through a: b = 1/conj(a) (infinite for a = 0).
inline LinePair real_line(Complex a)
{
    if (a == Complex(0.0, 0.0)) return {a, std::nullopt};
    return {a, 1.0 / std::conj(a)};
}

/// F(q) = c (q - a)/(q - b), with the b = infinity limit (q - a)/(1 - a).
inline Complex line_map(const LinePair& line, Complex q)
{
    const Complex a = line.a;
    if (a == Complex(1.0, 0.0)) throw DomainError("line parameter a must differ from 1");
    if (!line.b) return (q - a) / (1.0 - a);
    const Complex b = *line.b;
    if (b == Complex(1.0, 0.0)) throw DomainError("line parameter b must differ from 1");
    if (b == a) throw DomainError("line parameters must differ");
    if (q == b) throw DomainError("line coordinate evaluated at z^2 = b");
    return (1.0 - b) / (1.0 - a) * (q - a) / (q - b);
}

/// Odd branch w = z sqrt(F(z^2)/z^2); w(-z) = -w(z) and w(1) = 1.
inline Complex line_coordinate(const LinePair& line, Complex z)
{
    if (z == Complex(0.0, 0.0)) throw DomainError("line coordinate branch undefined at z = 0");
    if (z == Complex(1.0, 0.0)) return {1.0, 0.0};
    return z * std::sqrt(line_map(line, z * z) / (z * z));
}

/// w_i for the special points: w_1 = 1, the other roots taken with arg in
/// [0, pi) and required to increase.
inline std::vector<Complex> special_line_points(const MeromorphicTorusMap& map, const LinePair& line)
{
    std::vector<Complex> w;
    for (std::size_t i = 0; i < map.factors.size(); ++i) {
        if (i == 0) {
            w.emplace_back(1.0, 0.0);
            continue;
        }
        const Complex z = map.factors[i].z;
        Complex r = std::sqrt(line_map(line, z * z));
        if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() < 0.0)) r = -r;
        w.push_back(r);
    }
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (!(std::arg(w[i]) > std::arg(w[i - 1]))) {
            std::ostringstream msg;
            msg << "special line points are not ordered by argument:";
            for (const auto& x : w) msg << ' ' << std::arg(x);
            throw BranchError(msg.str());
        }
    }
    return w;
}

struct ABCoefficients {
    Complex2 A{};
    Complex2 B{};
    Complex2 scaled_A{}; // (b - a) A
    Complex2 scaled_B{}; // (b - a) B
    bool nondegenerate = false;
    std::vector<Complex> w;
};

inline ABCoefficients ab_coefficients(const MeromorphicTorusMap& map, const LinePair& line)
{
    ABCoefficients r;
    r.w = special_line_points(map, line);
    const double s = 1.0 / (4.0 * std::numbers::pi);
    for (std::size_t i = 0; i < r.w.size(); ++i) {
        const auto& v = map.factors[i].v;
        const Complex inv = 1.0 / r.w[i];
        r.scaled_A[0] += s * double(v.a) * inv;
        r.scaled_A[1] += s * double(v.b) * inv;
        r.scaled_B[0] += s * double(v.a) * r.w[i];
        r.scaled_B[1] += s * double(v.b) * r.w[i];
    }
    if (line.b) {
        const Complex d = *line.b - line.a;
        for (int j = 0; j < 2; ++j) {
            r.A[j] = r.scaled_A[j] / d;
            r.B[j] = r.scaled_B[j] / d;
        }
    }
    // nondegeneracy is scale free: test on the scaled pair
    const Complex det = r.scaled_A[0] * r.scaled_B[1] - r.scaled_B[0] * r.scaled_A[1];
    const double scale = std::max({std::abs(r.scaled_A[0]), std::abs(r.scaled_A[1])})
                         * std::max({std::abs(r.scaled_B[0]), std::abs(r.scaled_B[1])});
    r.nondegenerate = std::abs(det) > 1e-10 * std::max(scale, 1e-300);
    return r;
}

struct CrosscheckResult {
    double residual = 0.0;         // |Q + iP - (b - a) B|, max over components
    double literal_residual = 0.0; // same against (b - a) A
    Complex zeta;
    Complex2 joyce{};   // Q_j + i P_j
    Complex2 twistor{}; // (b - a) B
};

inline CrosscheckResult crosscheck_qp(const FanData& fan, const ConformalData& conf, Complex a)
{
    if (!(std::abs(a) < 1.0)) throw DomainError("crosscheck needs |a| < 1");
    const auto map = build_map(fan, conf);
    const auto ab = ab_coefficients(map, real_line(a));
    CrosscheckResult r;
    r.zeta = cayley_from_disc(a);
    const auto s = solution_value(fan, conf, r.zeta.real(), r.zeta.imag());
    for (int j = 0; j < 2; ++j) {
        r.joyce[j] = Complex(s.Q[j], s.P[j]);
        r.twistor[j] = ab.scaled_B[j];
        r.residual = std::max(r.residual, std::abs(r.joyce[j] - ab.scaled_B[j]));
        r.literal_residual = std::max(r.literal_residual, std::abs(r.joyce[j] - ab.scaled_A[j]));
    }
    return r;
}

/// Real conformal representative in coordinates (Re a, Im a, th_1, th_2):
///   |da|^2/(1 - |a|^2)^2 + ((P_2 dth_1 - P_1 dth_2)^2 + (Q_2 dth_1 - Q_1 dth_2)^2) / (4 D^2)
/// with Q + iP = (b - a) B.
inline Eigen::Matrix4d twistor_conformal_metric(const MeromorphicTorusMap& map, Complex a)
{
    const auto ab = ab_coefficients(map, real_line(a));
    const double Q1 = ab.scaled_B[0].real(), P1 = ab.scaled_B[0].imag();
    const double Q2 = ab.scaled_B[1].real(), P2 = ab.scaled_B[1].imag();
    const double D = P1 * Q2 - P2 * Q1;
    if (D == 0.0) throw SingularMetricError("twistor torus block is degenerate");
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    const double h = 1.0 / std::pow(1.0 - std::norm(a), 2);
    g(0, 0) = g(1, 1) = h;
    const double t = 1.0 / (4.0 * D * D);
    g(2, 2) = t * (P2 * P2 + Q2 * Q2);
    g(3, 3) = t * (P1 * P1 + Q1 * Q1);
    g(2, 3) = g(3, 2) = -t * (P1 * P2 + Q1 * Q2);
    return g;
}

// --- Gibbons-Hawking --------------------------------------------------------------

struct GHData {
    std::int64_t k = 0;
    std::vector<double> b_values; // strictly increasing
};

inline void validate_gh(const GHData& gh)
{
    if (gh.k < 1) throw ValidationError("Gibbons-Hawking data needs k >= 1");
    if (gh.b_values.size() != std::size_t(gh.k)) throw ValidationError("need exactly k b-values");
    for (std::size_t i = 1; i < gh.b_values.size(); ++i)
        if (!(gh.b_values[i - 1] < gh.b_values[i])) throw ValidationError("b-values must be strictly increasing");
    for (double b : gh.b_values)
        if (!std::isfinite(b)) throw ValidationError("b-values must be finite");
}

inline double beta_plus(double b) { return b + std::sqrt(b * b + 1.0); }
inline double beta_minus(double b) { return b - std::sqrt(b * b + 1.0); }

/// z_i = (beta_i^+ + i)/(beta_i^+ - i); unit modulus, arg = 2 arccot(beta_i^+),
/// strictly decreasing in (0, pi) as b_i increases.
inline std::vector<Complex> gh_special_points(const GHData& gh)
{
    validate_gh(gh);
    std::vector<Complex> z;
    for (double b : gh.b_values) {
        const double bp = beta_plus(b);
        z.push_back((Complex(bp, 1.0)) / Complex(bp, -1.0));
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (std::abs(std::abs(z[i]) - 1.0) > kUnitTolerance) throw ValidationError("GH special point off the unit circle");
        const double arg = std::arg(z[i]);
        if (!(arg > 0.0 && arg < std::numbers::pi)) throw ValidationError("GH special point arg outside (0, pi)");
        if (i > 0 && !(arg < std::arg(z[i - 1]))) throw ValidationError("GH special point args are not strictly ordered");
    }
    return z;
}

/// Factors z_0 = 1 with (2, k), then the GH points with (0, -1), sorted by arg.
inline MeromorphicTorusMap gh_map(const GHData& gh)
{
    auto z = gh_special_points(gh);
    std::sort(z.begin(), z.end(), [](Complex p, Complex q) { return std::arg(p) < std::arg(q); });
    MeromorphicTorusMap map;
    map.factors.push_back({Complex(1.0, 0.0), {2, gh.k}});
    for (const auto& p : z) map.factors.push_back({p, {0, -1}});
    return map;
}

/// Conformal data whose Cayley images are the GH special points.
inline ConformalData gh_conformal_data(const GHData& gh)
{
    std::vector<double> finite;
    for (const auto& p : gh_special_points(gh)) {
        const double phi = std::arg(p);
        finite.push_back(-std::cos(phi) / std::sin(phi));
    }
    std::sort(finite.begin(), finite.end());
    return ConformalData::from_finite(finite);
}

struct STCompare {
    Complex2 first{};   // (s, t) from the first displayed form
    Complex2 second{};  // exponent form over i = 0..k with z_0 = 1
    Complex2 hitchin{}; // (s, t) from -u^{-2} and x(-1/u)/x(u) at u = i(1 - z)/(1 + z)
    double residual = 0.0;         // first vs second
    double hitchin_residual = 0.0; // hitchin vs first at -1/z
};

namespace detail {

inline Complex gh_x(const GHData& gh, Complex u)
{
    Complex x{1.0, 0.0};
    for (double b : gh.b_values) x *= u - beta_plus(b);
    return x;
}

inline Complex gh_y(const GHData& gh, Complex u)
{
    Complex y{1.0, 0.0};
    for (double b : gh.b_values) y *= u - beta_minus(b);
    return y;
}

inline Complex2 gh_first_form(const std::vector<Complex>& zs, std::int64_t k, Complex z)
{
    if (z == Complex(-1.0, 0.0)) throw PoleError("(s,t) evaluated at z = -1", 0, {2, k});
    const Complex m = (z - 1.0) / (z + 1.0);
    Complex t = ipow(m, k);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (z == zs[i]) throw PoleError("(s,t) evaluated at a special point", i + 1, {0, 1});
        if (z == -zs[i]) throw PoleError("(s,t) evaluated at the antipode of a special point", i + 1, {0, -1});
        t *= (z + zs[i]) / (z - zs[i]);
    }
    return {m * m, t};
}

inline double rel_diff(const Complex2& p, const Complex2& q)
{
    double r = 0.0;
    for (int j = 0; j < 2; ++j) r = std::max(r, std::abs(p[j] - q[j]) / std::max(1.0, std::abs(q[j])));
    return r;
}

} // namespace detail

inline STCompare gh_st_compare(const GHData& gh, Complex z)
{
    const auto zs = gh_special_points(gh);
    STCompare r;
    r.first = detail::gh_first_form(zs, gh.k, z);

    MeromorphicTorusMap second;
    second.factors.push_back({Complex(1.0, 0.0), {2, gh.k}});
    for (const auto& p : zs) second.factors.push_back({p, {0, -1}});
    // ((z - z_i)/(z + z_i))^{(a_i, b_i)} is psi at -z
    r.second = psi_eval(second, -z);
    r.residual = detail::rel_diff(r.first, r.second);

    const Complex u = Complex(0.0, 1.0) * (1.0 - z) / (1.0 + z);
    if (u == Complex(0.0, 0.0)) throw PoleError("Hitchin parameter u vanishes at z = 1", 0, {-2, -gh.k});
    const Complex xu = detail::gh_x(gh, u);
    if (xu == Complex(0.0, 0.0)) throw PoleError("x(u) vanishes", 0, {0, 1});
    r.hitchin = {-1.0 / (u * u), detail::gh_x(gh, -1.0 / u) / xu};
    r.hitchin_residual = detail::rel_diff(r.hitchin, detail::gh_first_form(zs, gh.k, -1.0 / z));
    return r;
}

struct IncidenceResult {
    double residual = 0.0; // |x y - prod (z - p_i)|
    double relative = 0.0; // residual / max(1, |prod|)
};

/// x(u) = prod (u - beta_i^+), y(u) = prod (u - beta_i^-), z(u) = u^2 - 1, p_i(u) = 2 b_i u.
inline IncidenceResult hitchin_incidence(const GHData& gh, Complex u)
{
    validate_gh(gh);
    const Complex zu = u * u - 1.0;
    Complex rhs{1.0, 0.0};
    for (double b : gh.b_values) rhs *= zu - 2.0 * b * u;
    IncidenceResult r;
    r.residual = std::abs(detail::gh_x(gh, u) * detail::gh_y(gh, u) - rhs);
    r.relative = r.residual / std::max(1.0, std::abs(rhs));
    return r;
}

struct SectionResidual {
    double z_residual = 0.0;         // |z(su) - s z(u)|, relative
    double x_residual = 0.0;         // |x(su) - t x(u)|, relative
    double y_residual = 0.0;         // |y(su) - s^k t^{-1} y(u)|, relative
    double literal_y_residual = 0.0; // |y(su) - t y(u)|, relative (not expected to vanish)
    double max() const { return std::max({z_residual, x_residual, y_residual}); }
};

/// Invariance of the section (u, x, y, z) under u -> s u with s = -u^{-2},
/// t = x(su)/x(u): (su, t x, s^k t^{-1} y, s z) lies on the section.
inline SectionResidual gh_solution_residual(const GHData& gh, Complex u)
{
    validate_gh(gh);
    if (u == Complex(0.0, 0.0)) throw DomainError("section action needs u != 0");
    const Complex s = -1.0 / (u * u);
    const Complex su = s * u;
    const Complex xu = detail::gh_x(gh, u);
    if (xu == Complex(0.0, 0.0)) throw DomainError("x(u) vanishes; t is undefined");
    const Complex t = detail::gh_x(gh, su) / xu;
    if (t == Complex(0.0, 0.0)) throw DomainError("x(su) vanishes; t is not invertible");
    const auto rel = [](Complex p, Complex q) { return std::abs(p - q) / std::max(1.0, std::abs(q)); };
    const Complex zu = u * u - 1.0, zsu = su * su - 1.0;
    const Complex yu = detail::gh_y(gh, u), ysu = detail::gh_y(gh, su);
    SectionResidual r;
    r.z_residual = rel(zsu, s * zu);
    r.x_residual = rel(detail::gh_x(gh, su), t * xu);
    r.y_residual = rel(ysu, ipow(s, gh.k) / t * yu);
    r.literal_y_residual = rel(ysu, t * yu);
    return r;
}

} // namespace asdtoric

#endif // ASDTORIC_TWISTOR_HPP
