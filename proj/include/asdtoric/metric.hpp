#ifndef ASDTORIC_METRIC_HPP
#define ASDTORIC_METRIC_HPP

// Metrics on H^2 x T^2 in coordinates (x, y, theta_1, theta_2), indices 0..3.
//
//   g_J = (dx^2 + dy^2)/y^2
//       + ((P_2 dth_1 - P_1 dth_2)^2 + (Q_2 dth_1 - Q_1 dth_2)^2) / D^2,
//   D   = P_1 Q_2 - P_2 Q_1,
//   g_0 = y |D| g_J   (scalar-flat Kahler representative).

#include "errors.hpp"
#include "jet.hpp"
#include "joyce.hpp"
#include "lattice.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace asdtoric {

/// Metric components with their first and second coordinate derivatives.
struct MetricJet {
    std::array<double, 4> coords{}; // x, y, theta_1, theta_2
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    std::array<Eigen::Matrix4d, 4> dg;                // dg[a] = d_a g
    std::array<std::array<Eigen::Matrix4d, 4>, 4> d2g; // d2g[a][b] = d_a d_b g
    double scale2 = 1.0; // conformal factor relative to the Joyce representative

    MetricJet()
    {
        for (auto& m : dg) m.setZero();
        for (auto& row : d2g)
            for (auto& m : row) m.setZero();
    }
};

/// Evaluates a metric jet at (x, y); theta-independent by construction.
using MetricField = std::function<MetricJet(double x, double y)>;

using ComponentJets = std::array<std::array<Jet2, 4>, 4>;

inline MetricJet metric_from_components(const ComponentJets& c, double x, double y, double scale2 = 1.0)
{
    MetricJet m;
    m.coords = {x, y, 0.0, 0.0};
    m.scale2 = scale2;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            m.g(i, j) = c[i][j].v;
            for (int a = 0; a < 2; ++a) {
                m.dg[a](i, j) = c[i][j].d[a];
                for (int b = 0; b < 2; ++b) m.d2g[a][b](i, j) = c[i][j].h[a][b];
            }
        }
    }
    return m;
}

/// Conformal rescalings of the Joyce representative used across the suite.
enum class MetricScale { joyce, height, kahler };

inline std::string to_string(MetricScale s)
{
    switch (s) {
    case MetricScale::joyce: return "joyce";
    case MetricScale::height: return "height";
    case MetricScale::kahler: return "kahler";
    }
    return "?";
}

inline ComponentJets joyce_components(const SolutionJet& s)
{
    const Jet2 D = s.determinant();
    const double scale = std::max({std::abs(s.P[0].v), std::abs(s.P[1].v), std::abs(s.Q[0].v), std::abs(s.Q[1].v)});
    if (!std::isfinite(D.v) || std::abs(D.v) <= 1e-14 * scale * scale)
        throw SingularMetricError("torus determinant vanishes at (" + std::to_string(s.x) + ", " + std::to_string(s.y) + ")");

    const Jet2 y = Jet2::coordinate(s.y, 1);
    const Jet2 inv_y2 = reciprocal(y * y);
    const Jet2 inv_D2 = reciprocal(D * D);
    const auto& P = s.P;
    const auto& Q = s.Q;

    ComponentJets c{};
    c[0][0] = inv_y2;
    c[1][1] = inv_y2;
    c[2][2] = (P[1] * P[1] + Q[1] * Q[1]) * inv_D2;
    c[3][3] = (P[0] * P[0] + Q[0] * Q[0]) * inv_D2;
    c[2][3] = c[3][2] = -(P[0] * P[1] + Q[0] * Q[1]) * inv_D2;
    return c;
}

/// Conformal factor of the given scale as a jet (1, y, or y |D|).
inline Jet2 scale_factor(const SolutionJet& s, MetricScale scale)
{
    switch (scale) {
    case MetricScale::joyce: return Jet2::constant(1.0);
    case MetricScale::height: return Jet2::coordinate(s.y, 1);
    case MetricScale::kahler: {
        const Jet2 D = s.determinant();
        return Jet2::coordinate(s.y, 1) * (D.v < 0 ? -D : D);
    }
    }
    return Jet2::constant(1.0);
}

inline MetricJet scaled_metric_jet(const SolutionJet& s, MetricScale scale)
{
    auto c = joyce_components(s);
    const Jet2 f = scale_factor(s, scale);
    if (scale != MetricScale::joyce)
        for (auto& row : c)
            for (auto& e : row) e = e * f;
    return metric_from_components(c, s.x, s.y, f.v);
}

inline MetricJet conformal_metric_jet(const FanData& fan, const ConformalData& conf, double x, double y,
                                      WeightConvention weights = WeightConvention::offsets)
{
    return scaled_metric_jet(solution_jet(fan, conf, x, y, weights), MetricScale::joyce);
}

inline MetricJet kahler_metric_jet(const FanData& fan, const ConformalData& conf, double x, double y,
                                   WeightConvention weights = WeightConvention::offsets)
{
    return scaled_metric_jet(solution_jet(fan, conf, x, y, weights), MetricScale::kahler);
}

inline MetricField metric_field(const FanData& fan, const ConformalData& conf, MetricScale scale,
                                WeightConvention weights = WeightConvention::offsets)
{
    return [fan, conf, scale, weights](double x, double y) {
        return scaled_metric_jet(solution_jet(fan, conf, x, y, weights), scale);
    };
}

// --- Kahler form --------------------------------------------------------------

/// omega = dx ^ (Q_2 dth_1 - Q_1 dth_2) + dy ^ (P_2 dth_1 - P_1 dth_2).
/// Coefficients of d(omega) on dx^dy^dth_1 and dx^dy^dth_2.
inline std::array<double, 2> kahler_form_differential(const SolutionJet& s)
{
    return {s.P[1].d[0] - s.Q[1].d[1], s.Q[0].d[1] - s.P[0].d[0]};
}

inline double kahler_form_residual(const SolutionJet& s)
{
    const auto c = kahler_form_differential(s);
    return std::max(std::abs(c[0]), std::abs(c[1]));
}

inline double kahler_form_residual(const FanData& fan, const ConformalData& conf, double x, double y)
{
    return kahler_form_residual(solution_jet(fan, conf, x, y));
}

// --- moment map ---------------------------------------------------------------

/// mu = x v_1^perp + sum_{i >= 2} |zeta - zeta_i| v_i^perp; finite for y >= 0.
inline std::array<double, 2> moment_map(const FanData& fan, const ConformalData& conf, double x, double y)
{
    if (y < 0.0) throw DomainError("moment map requires y >= 0");
    validate_conformal(conf, fan.size());
    const auto v = derive_offsets(fan).offsets;
    std::array<double, 2> mu{};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const LatticeVector n = perp(v[i]);
        const double w = i == 0 ? x : std::hypot(x - conf.zetas[i], y);
        mu[0] += w * static_cast<double>(n.a);
        mu[1] += w * static_cast<double>(n.b);
    }
    return mu;
}

struct EdgeReport {
    std::size_t segment = 0;
    std::array<double, 2> direction{}; // unit, oriented along increasing x
    double line_residual = 0.0;        // max distance of samples from the fitted line
    double angle_to_stabilizer_perp = 0.0;
    bool unbounded = false;
};

struct PolytopeReport {
    std::vector<std::array<double, 2>> vertices; // images of zeta_2, ..., zeta_k
    std::vector<EdgeReport> edges;
    std::vector<int> turning_signs;
    double total_turning = 0.0;
    std::size_t interior_samples = 0;
    std::size_t interior_outside = 0;
    double max_line_residual = 0.0;
    double max_slope_angle = 0.0;
    bool convex = false;
    std::vector<std::string> notes;
};

namespace detail {

inline EdgeReport fit_edge(const std::vector<std::array<double, 2>>& pts)
{
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) mean += Eigen::Vector2d(p[0], p[1]);
    mean /= double(pts.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector2d d = Eigen::Vector2d(p[0], p[1]) - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    Eigen::Vector2d dir = es.eigenvectors().col(1);
    const Eigen::Vector2d span = Eigen::Vector2d(pts.back()[0], pts.back()[1]) - Eigen::Vector2d(pts.front()[0], pts.front()[1]);
    if (dir.dot(span) < 0) dir = -dir;
    EdgeReport e;
    e.direction = {dir[0], dir[1]};
    const Eigen::Vector2d normal(-dir[1], dir[0]);
    for (const auto& p : pts) e.line_residual = std::max(e.line_residual, std::abs(normal.dot(Eigen::Vector2d(p[0], p[1]) - mean)));
    return e;
}

inline double line_angle(const std::array<double, 2>& d, const LatticeVector& u)
{
    const double ua = double(u.a), ub = double(u.b);
    return std::atan2(std::abs(d[0] * ub - d[1] * ua), std::abs(d[0] * ua + d[1] * ub));
}

} // namespace detail

/// Samples the moment image: edges from boundary segments, vertices from the
/// finite boundary points, and a grid of interior points for hull membership.
inline PolytopeReport polytope_probe(const FanData& fan, const ConformalData& conf, std::size_t samples_per_edge = 10,
                                     std::size_t interior_nx = 24, std::size_t interior_ny = 12)
{
    validate_conformal(conf, fan.size());
    const std::size_t k = fan.size();
    PolytopeReport rep;
    rep.notes.push_back("zeta_1 = inf is mapped to infinity; the first and last edges are unbounded");

    for (std::size_t i = 1; i < k; ++i) rep.vertices.push_back(moment_map(fan, conf, conf.zetas[i], 0.0));

    const double lo_all = conf.zetas.size() > 1 ? conf.zetas[1] : 0.0;
    const double hi_all = conf.zetas.size() > 1 ? conf.zetas.back() : 0.0;
    const double span = std::max(1.0, hi_all - lo_all);

    for (std::size_t m = 0; m < k; ++m) {
        auto [lo, hi] = boundary_segment(conf, m);
        EdgeReport e;
        const bool unbounded = std::isinf(lo) || std::isinf(hi);
        if (std::isinf(lo) && std::isinf(hi)) {
            lo = -span;
            hi = span;
        } else if (std::isinf(lo)) {
            lo = hi - 3.0 * span;
        } else if (std::isinf(hi)) {
            hi = lo + 3.0 * span;
        }
        std::vector<std::array<double, 2>> pts;
        const double pad = 1e-3 * (hi - lo);
        for (std::size_t s = 0; s < samples_per_edge; ++s) {
            const double t = samples_per_edge == 1 ? 0.5 : double(s) / double(samples_per_edge - 1);
            pts.push_back(moment_map(fan, conf, lo + pad + t * (hi - lo - 2 * pad), 0.0));
        }
        e = detail::fit_edge(pts);
        e.segment = m;
        e.unbounded = unbounded;
        e.angle_to_stabilizer_perp = detail::line_angle(e.direction, perp(fan.ray(m)));
        rep.max_line_residual = std::max(rep.max_line_residual, e.line_residual);
        rep.max_slope_angle = std::max(rep.max_slope_angle, e.angle_to_stabilizer_perp);
        rep.edges.push_back(e);
    }

    for (std::size_t m = 1; m < k; ++m) {
        const auto& d0 = rep.edges[m - 1].direction;
        const auto& d1 = rep.edges[m].direction;
        const double turn = std::atan2(d0[0] * d1[1] - d0[1] * d1[0], d0[0] * d1[0] + d0[1] * d1[1]);
        rep.turning_signs.push_back(turn > 0 ? 1 : (turn < 0 ? -1 : 0));
        rep.total_turning += turn;
    }
    const int s = rep.turning_signs.empty() ? 0 : rep.turning_signs.front();
    bool turning_ok = s != 0;
    for (int t : rep.turning_signs) turning_ok = turning_ok && t == s;
    turning_ok = turning_ok && std::abs(rep.total_turning) < std::numbers::pi;

    // Hull membership: interior images lie on the inner side of every edge line.
    const double x0 = lo_all - span, x1 = hi_all + span;
    for (std::size_t i = 0; i < interior_nx; ++i) {
        for (std::size_t j = 1; j <= interior_ny; ++j) {
            const double x = x0 + (x1 - x0) * (double(i) + 0.5) / double(interior_nx);
            const double y = 2.0 * span * double(j) / double(interior_ny);
            const auto p = moment_map(fan, conf, x, y);
            ++rep.interior_samples;
            bool inside = true;
            for (std::size_t m = 0; m < k && s != 0; ++m) {
                const auto& d = rep.edges[m].direction;
                const auto& base = rep.vertices[m == 0 ? 0 : m - 1];
                const double side = d[0] * (p[1] - base[1]) - d[1] * (p[0] - base[0]);
                const double tol = 1e-9 * std::max(1.0, std::hypot(p[0] - base[0], p[1] - base[1]));
                if (s * side < -tol) inside = false;
            }
            if (!inside) ++rep.interior_outside;
        }
    }
    rep.convex = turning_ok && rep.interior_outside == 0;
    return rep;
}

// --- grid output ----------------------------------------------------------------

inline const char* kMetricComponentNames[10] = {"g_xx", "g_xy", "g_xt1", "g_xt2", "g_yy",
                                                "g_yt1", "g_yt2", "g_t1t1", "g_t1t2", "g_t2t2"};

inline void write_csv_header(std::ostream& os)
{
    os << "x,y,P1,P2,Q1,Q2,det";
    for (const char* n : kMetricComponentNames) os << ',' << n;
    os << '\n';
}

inline void write_csv_row(std::ostream& os, const SolutionJet& s, const MetricJet& m)
{
    os.precision(17);
    os << s.x << ',' << s.y << ',' << s.P[0].v << ',' << s.P[1].v << ',' << s.Q[0].v << ',' << s.Q[1].v << ','
       << torus_determinant(s);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) os << ',' << m.g(i, j);
    os << '\n';
}

} // namespace asdtoric

#endif // ASDTORIC_METRIC_HPP
