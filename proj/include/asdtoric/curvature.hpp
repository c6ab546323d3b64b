#ifndef ASDTORIC_CURVATURE_HPP
#define ASDTORIC_CURVATURE_HPP

// Riemannian curvature of a 4-metric from its jet.
//
// Conventions (index order x, y, theta_1, theta_2):
//   Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)
//   R^a_bcd    = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
//   R_abcd     = g_ae R^e_bcd,   Ric_bd = g^ac R_abcd,   s = g^bd Ric_bd
// Norms are full contractions with the metric, no prefactors.

#include "errors.hpp"
#include "metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace asdtoric {

using Tensor3 = std::array<std::array<std::array<double, 4>, 4>, 4>;
using Tensor4 = std::array<Tensor3, 4>;

struct CurvatureTensors {
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d ginv = Eigen::Matrix4d::Zero();
    Tensor3 christoffel{}; // Gamma^a_bc
    Tensor4 riemann{};     // R_abcd
    Eigen::Matrix4d ricci = Eigen::Matrix4d::Zero();
    double scalar = 0.0;
};

namespace detail {

inline Eigen::Matrix4d checked_inverse(const Eigen::Matrix4d& g)
{
    Eigen::LLT<Eigen::Matrix4d> llt(g);
    if (llt.info() != Eigen::Success || !g.allFinite()) throw SingularMetricError("metric is not positive definite");
    const double cond = g.norm() * llt.solve(Eigen::Matrix4d::Identity()).norm();
    if (!std::isfinite(cond) || cond > 1e14) throw SingularMetricError("metric is numerically singular");
    return llt.solve(Eigen::Matrix4d::Identity());
}

inline Tensor3 christoffel(const Eigen::Matrix4d& ginv, const std::array<Eigen::Matrix4d, 4>& dg)
{
    // first kind: [d, bc] = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    Tensor3 first{};
    for (int d = 0; d < 4; ++d)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) first[d][b][c] = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
    Tensor3 out{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) {
                double s = 0.0;
                for (int d = 0; d < 4; ++d) s += ginv(a, d) * first[d][b][c];
                out[a][b][c] = s;
            }
    return out;
}

inline void contract(CurvatureTensors& t)
{
    t.ricci.setZero();
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) s += t.ginv(a, c) * t.riemann[a][b][c][d];
            t.ricci(b, d) = s;
        }
    t.scalar = (t.ginv.cwiseProduct(t.ricci)).sum();
}

} // namespace detail

/// Curvature from the order-2 jet in closed form.
inline CurvatureTensors curvature_tensors(const MetricJet& m)
{
    CurvatureTensors t;
    t.g = m.g;
    t.ginv = detail::checked_inverse(m.g);
    t.christoffel = detail::christoffel(t.ginv, m.dg);
    const auto& G = t.christoffel;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double r = 0.5 * (m.d2g[b][c](a, d) + m.d2g[a][d](b, c) - m.d2g[a][c](b, d) - m.d2g[b][d](a, c));
                    for (int e = 0; e < 4; ++e)
                        for (int f = 0; f < 4; ++f) r += m.g(e, f) * (G[e][b][c] * G[f][a][d] - G[e][b][d] * G[f][a][c]);
                    t.riemann[a][b][c][d] = r;
                }
    detail::contract(t);
    return t;
}

/// Curvature with d Gamma from central differences of neighbouring jets,
/// step h in x and y (theta derivatives vanish).
inline CurvatureTensors curvature_tensors_fd(const MetricField& field, double x, double y, double h)
{
    if (!(h > 0.0) || !(y - h > 0.0)) throw DomainError("finite-difference step must satisfy 0 < h < y");
    const MetricJet m = field(x, y);
    CurvatureTensors t;
    t.g = m.g;
    t.ginv = detail::checked_inverse(m.g);
    t.christoffel = detail::christoffel(t.ginv, m.dg);

    std::array<Tensor3, 4> dG{}; // dG[c] = d_c Gamma
    const std::array<std::array<double, 2>, 2> offsets{{{h, 0.0}, {0.0, h}}};
    for (int c = 0; c < 2; ++c) {
        const MetricJet p = field(x + offsets[c][0], y + offsets[c][1]);
        const MetricJet q = field(x - offsets[c][0], y - offsets[c][1]);
        const Tensor3 gp = detail::christoffel(detail::checked_inverse(p.g), p.dg);
        const Tensor3 gq = detail::christoffel(detail::checked_inverse(q.g), q.dg);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int e = 0; e < 4; ++e) dG[c][a][b][e] = (gp[a][b][e] - gq[a][b][e]) / (2.0 * h);
    }

    const auto& G = t.christoffel;
    Tensor4 up{}; // R^a_bcd
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double r = dG[c][a][d][b] - dG[d][a][c][b];
                    for (int e = 0; e < 4; ++e) r += G[a][c][e] * G[e][d][b] - G[a][d][e] * G[e][c][b];
                    up[a][b][c][d] = r;
                }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    double r = 0.0;
                    for (int e = 0; e < 4; ++e) r += m.g(a, e) * up[e][b][c][d];
                    t.riemann[a][b][c][d] = r;
                }
    detail::contract(t);
    return t;
}

/// Full contraction T_abcd T^abcd.
inline double norm2(const Tensor4& T, const Eigen::Matrix4d& ginv)
{
    // raise all indices one at a time
    Tensor4 a = T, b{};
    for (int slot = 0; slot < 4; ++slot) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l) {
                        std::array<int, 4> idx{i, j, k, l};
                        double s = 0.0;
                        for (int e = 0; e < 4; ++e) {
                            auto src = idx;
                            src[slot] = e;
                            s += ginv(idx[slot], e) * a[src[0]][src[1]][src[2]][src[3]];
                        }
                        b[i][j][k][l] = s;
                    }
        a = b;
    }
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) s += T[i][j][k][l] * a[i][j][k][l];
    return s;
}

inline Tensor4 weyl_tensor(const CurvatureTensors& t)
{
    const auto& g = t.g;
    const auto& Ric = t.ricci;
    const double s = t.scalar;
    Tensor4 W{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d)
                    W[a][b][c][d] = t.riemann[a][b][c][d]
                                    - 0.5 * (g(a, c) * Ric(b, d) - g(a, d) * Ric(b, c) - g(b, c) * Ric(a, d) + g(b, d) * Ric(a, c))
                                    + s / 6.0 * (g(a, c) * g(b, d) - g(a, d) * g(b, c));
    return W;
}

/// Largest |R_abcd + R_acdb + R_adbc| over index triples, relative to max |R|.
inline double bianchi_residual(const CurvatureTensors& t)
{
    double worst = 0.0, scale = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    scale = std::max(scale, std::abs(t.riemann[a][b][c][d]));
                    worst = std::max(worst, std::abs(t.riemann[a][b][c][d] + t.riemann[a][c][d][b] + t.riemann[a][d][b][c]));
                }
    return scale > 0.0 ? worst / scale : worst;
}

/// Largest |g^ac W_abcd| relative to max |W| (or absolute when W vanishes).
inline double weyl_trace_residual(const CurvatureTensors& t)
{
    const auto W = weyl_tensor(t);
    double worst = 0.0, scale = 0.0;
    for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 4; ++d) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 4; ++c) {
                    s += t.ginv(a, c) * W[a][b][c][d];
                    scale = std::max(scale, std::abs(W[a][b][c][d]));
                }
            worst = std::max(worst, std::abs(s));
        }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) scale = std::max(scale, std::abs(t.riemann[a][b][c][d]));
    return scale > 0.0 ? worst / scale : worst;
}

struct WeylSplit {
    double sd_norm2 = 0.0;  // |W+|^2
    double asd_norm2 = 0.0; // |W-|^2
    double weyl_norm2 = 0.0;
    double riemann_norm2 = 0.0;
    bool conformally_flat = false;

    /// |W+|^2 / (|W+|^2 + |W-|^2), 0 when conformally flat.
    double asd_ratio() const
    {
        const double total = sd_norm2 + asd_norm2;
        return conformally_flat || total <= 0.0 ? 0.0 : sd_norm2 / total;
    }
};

/// Self-dual / anti-self-dual split of the Weyl tensor; orientation +1 takes
/// dx ^ dy ^ dth_1 ^ dth_2 as the volume form, -1 its negative.
inline WeylSplit weyl_split(const CurvatureTensors& t, int orientation)
{
    if (orientation != 1 && orientation != -1) throw ValidationError("orientation must be +1 or -1");
    const Tensor4 W = weyl_tensor(t);

    // orthonormal frame: g = L L^T, E = L^{-T} (columns are frame vectors, positively oriented)
    Eigen::LLT<Eigen::Matrix4d> llt(t.g);
    const Eigen::Matrix4d L = llt.matrixL();
    const Eigen::Matrix4d E = L.inverse().transpose();

    Tensor4 a = W, b{};
    for (int slot = 0; slot < 4; ++slot) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l) {
                        std::array<int, 4> idx{i, j, k, l};
                        double s = 0.0;
                        for (int e = 0; e < 4; ++e) {
                            auto src = idx;
                            src[slot] = e;
                            s += E(e, idx[slot]) * a[src[0]][src[1]][src[2]][src[3]];
                        }
                        b[i][j][k][l] = s;
                    }
        a = b;
    }

    static constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}, {1, 2}}};
    Eigen::Matrix<double, 6, 6> M;
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) M(I, J) = a[pairs[I][0]][pairs[I][1]][pairs[J][0]][pairs[J][1]];

    Eigen::Matrix<double, 6, 6> star = Eigen::Matrix<double, 6, 6>::Zero();
    star.block<3, 3>(0, 3).setIdentity();
    star.block<3, 3>(3, 0).setIdentity();
    star *= double(orientation);
    const Eigen::Matrix<double, 6, 6> I6 = Eigen::Matrix<double, 6, 6>::Identity();
    const Eigen::Matrix<double, 6, 6> plus = 0.5 * (I6 + star);
    const Eigen::Matrix<double, 6, 6> minus = 0.5 * (I6 - star);

    WeylSplit out;
    out.sd_norm2 = 4.0 * (plus * M * plus).squaredNorm();
    out.asd_norm2 = 4.0 * (minus * M * minus).squaredNorm();
    out.weyl_norm2 = 4.0 * M.squaredNorm();
    out.riemann_norm2 = norm2(t.riemann, t.ginv);
    out.conformally_flat = out.weyl_norm2 <= 1e-16 * out.riemann_norm2 || out.weyl_norm2 < 1e-28;
    return out;
}

/// Volume-form orientation in which the Joyce metrics are anti-self-dual,
/// relative to the orientation sign reported by negative_definite_check.
inline constexpr int kAsdOrientation = 1;

/// Orientation to pass to weyl_split for the given fan orientation (+1 or -1).
inline int asd_orientation(int fan_orientation) { return kAsdOrientation * (fan_orientation < 0 ? -1 : 1); }

/// Pointwise version: the sign of the torus determinant P1 Q2 - P2 Q1 plays the
/// role of the fan orientation, and also covers fans whose vertex signs are mixed.
inline int asd_orientation(const SolutionJet& s) { return kAsdOrientation * (torus_determinant(s) < 0.0 ? -1 : 1); }

// --- reports --------------------------------------------------------------------

struct CurvatureSample {
    double x = 0.0;
    double y = 0.0;
    double scalar = 0.0;
    double normalized_scalar = 0.0; // |s| times the conformal factor relative to g_J
    double ricci_norm = 0.0;
    double weyl_sd_norm2 = 0.0;
    double weyl_asd_norm2 = 0.0;
    double asd_ratio = 0.0;
    bool conformally_flat = false;
};

inline CurvatureSample curvature_sample(const MetricJet& m, int orientation)
{
    const auto t = curvature_tensors(m);
    const auto w = weyl_split(t, orientation);
    CurvatureSample s;
    s.x = m.coords[0];
    s.y = m.coords[1];
    s.scalar = t.scalar;
    s.normalized_scalar = std::abs(t.scalar) * m.scale2;
    s.ricci_norm = std::sqrt(std::max(0.0, (t.ginv * t.ricci * t.ginv).cwiseProduct(t.ricci).sum()));
    s.weyl_sd_norm2 = w.sd_norm2;
    s.weyl_asd_norm2 = w.asd_norm2;
    s.asd_ratio = w.asd_ratio();
    s.conformally_flat = w.conformally_flat;
    return s;
}

struct RichardsonCheck {
    std::array<double, 3> values{}; // quantity at h, h/2, h/4
    double order = 0.0;             // log2 of successive difference ratio
    double truncation_estimate = 0.0;
    bool converged = false;
};

/// Step-halving estimate for a finite-difference quantity q(h).
template <class F>
RichardsonCheck richardson(F&& q, double h, double min_order = 1.5)
{
    RichardsonCheck r;
    r.values = {q(h), q(h / 2), q(h / 4)};
    const double d1 = std::abs(r.values[0] - r.values[1]);
    const double d2 = std::abs(r.values[1] - r.values[2]);
    r.order = d2 > 0.0 ? std::log2(d1 / d2) : (d1 > 0.0 ? INFINITY : 0.0);
    r.truncation_estimate = d1 / 3.0;
    r.converged = r.order >= min_order;
    return r;
}

struct ScalarFlatSample {
    double x = 0.0;
    double y = 0.0;
    double scalar = 0.0;            // analytic route
    double normalized_scalar = 0.0; // |s| * y |D|
    double fd_normalized_scalar = 0.0;
    RichardsonCheck richardson;
};

struct ScalarFlatReport {
    std::vector<ScalarFlatSample> samples;
    double max_normalized_scalar = 0.0;
    double max_fd_normalized_scalar = 0.0;
    double min_order = INFINITY;
    bool all_converged = true;
};

inline constexpr double kDefaultRelativeStep = 1e-4;
// Halving starts here so that truncation, not roundoff, dominates all three steps.
inline constexpr double kRichardsonRelativeStep = 1e-3;

inline ScalarFlatReport scalar_flat_check(const FanData& fan, const ConformalData& conf,
                                          const std::vector<std::array<double, 2>>& points,
                                          double relative_step = kDefaultRelativeStep,
                                          MetricScale scale = MetricScale::kahler,
                                          double richardson_step = kRichardsonRelativeStep)
{
    const auto field = metric_field(fan, conf, scale);
    ScalarFlatReport rep;
    for (const auto& p : points) {
        ScalarFlatSample s;
        s.x = p[0];
        s.y = p[1];
        const MetricJet m = field(p[0], p[1]);
        const auto t = curvature_tensors(m);
        s.scalar = t.scalar;
        s.normalized_scalar = std::abs(t.scalar) * m.scale2;
        const auto fd = [&](double step) { return curvature_tensors_fd(field, p[0], p[1], step).scalar * m.scale2; };
        s.fd_normalized_scalar = std::abs(fd(relative_step * p[1]));
        s.richardson = richardson(fd, richardson_step * p[1]);
        rep.max_normalized_scalar = std::max(rep.max_normalized_scalar, s.normalized_scalar);
        rep.max_fd_normalized_scalar = std::max(rep.max_fd_normalized_scalar, s.fd_normalized_scalar);
        rep.min_order = std::min(rep.min_order, s.richardson.order);
        rep.all_converged = rep.all_converged && s.richardson.converged;
        rep.samples.push_back(s);
    }
    return rep;
}

} // namespace asdtoric

#endif // ASDTORIC_CURVATURE_HPP
