// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <asdtoric/asdtoric.hpp>

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace asdtoric;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct NamedFan {
    const char* name;
    FanData fan;
};

std::vector<NamedFan> core_fans()
{
    return {{"S4", fans::s4()},
            {"CP2_113", fans::weighted_projective_plane(3)},
            {"GH2", fans::gibbons_hawking(2)},
            {"GH3", fans::gibbons_hawking(3)},
            {"GH5", fans::gibbons_hawking(5)}};
}

/// k - 1 increasing finite points in [-3, 3] with gaps of at least 0.2.
ConformalData random_conformal(std::mt19937_64& rng, std::size_t k)
{
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    while (true) {
        std::vector<double> z;
        for (std::size_t i = 0; i + 1 < k; ++i) z.push_back(d(rng));
        std::sort(z.begin(), z.end());
        bool ok = true;
        for (std::size_t i = 1; i < z.size(); ++i) ok = ok && z[i] - z[i - 1] > 0.2;
        if (ok) return ConformalData::from_finite(z);
    }
}

std::array<double, 2> random_point(std::mt19937_64& rng, double ylo = 0.1)
{
    std::uniform_real_distribution<double> xs(-4.0, 4.0), ys(ylo, 3.0);
    return {xs(rng), ys(rng)};
}

FanData random_valid_fan(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> comp(-5, 5);
    std::uniform_int_distribution<std::size_t> count(2, 7);
    while (true) {
        FanData f;
        const auto k = count(rng);
        while (f.rays.size() < k) {
            LatticeVector u{comp(rng), comp(rng)};
            if (sector_normalized(u)) f.rays.push_back(u);
        }
        if (validate_fan(f).ok()) return f;
    }
}

GHData gh3_data() { return {3, {0.5, 1.0, 2.0}}; }

// --- 1 ----------------------------------------------------------------------------------------

Outcome pde_satisfaction()
{
    std::mt19937_64 rng(101);
    double worst = 0.0;
    std::size_t n = 0;
    for (const auto& f : core_fans()) {
        const auto conf = random_conformal(rng, f.fan.size());
        for (int i = 0; i < 200; ++i) {
            const auto p = random_point(rng, 0.05);
            worst = std::max(worst, pde_residual(solution_jet(f.fan, conf, p[0], p[1])).max_abs());
            ++n;
        }
    }
    return {worst < 1e-10, fmt("max residual %.3e over %zu points, 5 fans", worst, n)};
}

// --- 2 ----------------------------------------------------------------------------------------

Outcome derivative_correctness()
{
    std::mt19937_64 rng(102);
    const double h = 1e-5;
    double worst_sol = 0.0, worst_metric = 0.0;
    const auto all = core_fans();
    for (int n = 0; n < 100; ++n) {
        const auto& f = all[n % all.size()];
        const auto conf = random_conformal(rng, f.fan.size());
        const auto p = random_point(rng);
        const double x = p[0], y = p[1];

        // solution jets: first derivatives from values, second from analytic first derivatives
        const auto s = solution_jet(f.fan, conf, x, y);
        const std::array<std::array<SolutionValue, 2>, 2> vals = {
            std::array{solution_value(f.fan, conf, x - h, y), solution_value(f.fan, conf, x + h, y)},
            std::array{solution_value(f.fan, conf, x, y - h), solution_value(f.fan, conf, x, y + h)}};
        const std::array<std::array<SolutionJet, 2>, 2> jets = {
            std::array{solution_jet(f.fan, conf, x - h, y), solution_jet(f.fan, conf, x + h, y)},
            std::array{solution_jet(f.fan, conf, x, y - h), solution_jet(f.fan, conf, x, y + h)}};
        double err = 0.0, scale = 0.0;
        for (int c = 0; c < 2; ++c)
            for (int a = 0; a < 2; ++a) {
                const double fp = (vals[a][1].P[c] - vals[a][0].P[c]) / (2 * h);
                const double fq = (vals[a][1].Q[c] - vals[a][0].Q[c]) / (2 * h);
                err = std::max({err, std::abs(fp - s.P[c].d[a]), std::abs(fq - s.Q[c].d[a])});
                scale = std::max({scale, std::abs(s.P[c].d[a]), std::abs(s.Q[c].d[a])});
                for (int b = 0; b < 2; ++b) {
                    const double hp = (jets[b][1].P[c].d[a] - jets[b][0].P[c].d[a]) / (2 * h);
                    const double hq = (jets[b][1].Q[c].d[a] - jets[b][0].Q[c].d[a]) / (2 * h);
                    err = std::max({err, std::abs(hp - s.P[c].h[a][b]), std::abs(hq - s.Q[c].h[a][b])});
                    scale = std::max({scale, std::abs(s.P[c].h[a][b]), std::abs(s.Q[c].h[a][b])});
                }
            }
        worst_sol = std::max(worst_sol, err / scale);

        // metric jets of the Kahler representative
        const auto field = metric_field(f.fan, conf, MetricScale::kahler);
        const auto m = field(x, y);
        const std::array<std::array<MetricJet, 2>, 2> mj = {std::array{field(x - h, y), field(x + h, y)},
                                                            std::array{field(x, y - h), field(x, y + h)}};
        double merr = 0.0, mscale = 0.0;
        for (int a = 0; a < 2; ++a) {
            const Eigen::Matrix4d dg = (mj[a][1].g - mj[a][0].g) / (2 * h);
            merr = std::max(merr, (dg - m.dg[a]).cwiseAbs().maxCoeff());
            mscale = std::max(mscale, m.dg[a].cwiseAbs().maxCoeff());
            for (int b = 0; b < 2; ++b) {
                const Eigen::Matrix4d d2 = (mj[b][1].dg[a] - mj[b][0].dg[a]) / (2 * h);
                merr = std::max(merr, (d2 - m.d2g[a][b]).cwiseAbs().maxCoeff());
                mscale = std::max(mscale, m.d2g[a][b].cwiseAbs().maxCoeff());
            }
        }
        // no dependence on the torus angles
        for (int a = 2; a < 4; ++a) merr = std::max(merr, m.dg[a].cwiseAbs().maxCoeff());
        worst_metric = std::max(worst_metric, merr / mscale);
    }
    return {worst_sol < 1e-6 && worst_metric < 1e-6,
            fmt("step 1e-5, 100 points: solution jets rel %.3e, metric jets rel %.3e", worst_sol, worst_metric)};
}

// --- 3 ----------------------------------------------------------------------------------------

Outcome anti_self_duality()
{
    std::mt19937_64 rng(103);
    const auto fan = fans::gibbons_hawking(3);
    const auto conf = gh_conformal_data(gh3_data());
    const int o = asd_orientation(negative_definite_check(fan).orientation);
    double worst = 0.0, flipped = INFINITY;
    for (int i = 0; i < 20; ++i) {
        const auto p = random_point(rng);
        const auto t = curvature_tensors(conformal_metric_jet(fan, conf, p[0], p[1]));
        worst = std::max(worst, weyl_split(t, o).asd_ratio());
        flipped = std::min(flipped, weyl_split(t, -o).asd_ratio());
    }
    return {worst < 1e-4 && flipped > 0.5,
            fmt("GH3, 20 points: max ratio %.3e (orientation %+d), min flipped ratio %.6f", worst, o, flipped)};
}

// --- 4 ----------------------------------------------------------------------------------------

Outcome scalar_flatness()
{
    std::mt19937_64 rng(104);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_point(rng));
    const auto rep = scalar_flat_check(fans::gibbons_hawking(3), gh_conformal_data(gh3_data()), pts);
    const bool ok = rep.max_fd_normalized_scalar < 1e-4 && rep.max_normalized_scalar < 1e-4 && rep.all_converged
                    && rep.min_order >= 1.5;
    return {ok, fmt("GH3, 20 points: max |s| y|D| finite-difference %.3e, analytic %.3e; min Richardson order %.3f",
                    rep.max_fd_normalized_scalar, rep.max_normalized_scalar, rep.min_order)};
}

// --- 5 ----------------------------------------------------------------------------------------

Outcome kahler_closedness()
{
    std::mt19937_64 rng(105);
    const auto all = core_fans();
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        const auto& f = all[n % all.size()];
        const auto conf = random_conformal(rng, f.fan.size());
        const auto p = random_point(rng);
        worst = std::max(worst, kahler_form_residual(f.fan, conf, p[0], p[1]));
    }

    // corrupt the first derivatives and fit d(omega) = L r1 by least squares
    std::normal_distribution<double> noise(0.0, 0.1);
    const int samples = 60;
    Eigen::MatrixXd R(samples, 2), W(samples, 2);
    for (int n = 0; n < samples; ++n) {
        const auto& f = all[n % all.size()];
        const auto conf = random_conformal(rng, f.fan.size());
        const auto p = random_point(rng);
        auto s = solution_jet(f.fan, conf, p[0], p[1]);
        for (int c = 0; c < 2; ++c)
            for (int a = 0; a < 2; ++a) {
                s.P[c].d[a] += noise(rng);
                s.Q[c].d[a] += noise(rng);
            }
        const auto r = pde_residual(s).r1;
        const auto w = kahler_form_differential(s);
        R.row(n) << r[0], r[1];
        W.row(n) << w[0], w[1];
    }
    const Eigen::MatrixXd Lt = R.colPivHouseholderQr().solve(W);
    const double fit = (R * Lt - W).cwiseAbs().maxCoeff();
    const Eigen::Matrix2d L = Lt.transpose();
    const bool rank_ok = R.colPivHouseholderQr().rank() == 2;
    return {worst < 1e-10 && fit < 1e-12 && rank_ok,
            fmt("max residual %.3e at 100 points; corrupted jets: d(omega) = [[%.3f, %.3f], [%.3f, %.3f]] r1, misfit %.2e",
                worst, L(0, 0), L(0, 1), L(1, 0), L(1, 1), fit)};
}

// --- 6 ----------------------------------------------------------------------------------------

Outcome twistor_consistency()
{
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> u(0.0, 1.0), t(0.0, 2.0 * pi), z(-2.0, 2.0);
    double s4 = 0.0, gh = 0.0;
    const auto gh_fan = fans::gibbons_hawking(3);
    const auto gh_conf = gh_conformal_data(gh3_data());
    const auto s4_conf = ConformalData::from_finite({z(rng)});
    s4 = crosscheck_qp(fans::s4(), ConformalData::from_finite({0.0}), 0.0).residual;
    for (int i = 0; i < 50; ++i) {
        const Complex a = std::polar(0.95 * std::sqrt(u(rng)), t(rng));
        s4 = std::max(s4, crosscheck_qp(fans::s4(), s4_conf, a).residual);
        gh = std::max(gh, crosscheck_qp(gh_fan, gh_conf, a).residual);
    }
    return {s4 < 1e-8 && gh < 1e-8, fmt("50 disc points: S4 %.3e, GH3 %.3e", s4, gh)};
}

// --- 7 ----------------------------------------------------------------------------------------

Outcome psi_invariants()
{
    std::mt19937_64 rng(107);
    std::vector<MeromorphicTorusMap> maps;
    for (const auto& f : core_fans()) maps.push_back(build_map(f.fan, random_conformal(rng, f.fan.size())));
    const auto hj = hirzebruch_jung_fan(7, 3);
    maps.push_back(build_map(hj, random_conformal(rng, hj.size())));
    maps.push_back(gh_map(gh3_data()));

    std::uniform_real_distribution<double> r(0.05, 0.8), t(0.0, 2.0 * pi);
    std::bernoulli_distribution inside(0.5);
    double origin = 0.0, inversion = 0.0, reality = 0.0, order = 0.0;
    bool exact = true;
    for (const auto& map : maps) {
        const auto p0 = psi_eval(map, 0.0);
        origin = std::max({origin, std::abs(p0[0] - 1.0), std::abs(p0[1] - 1.0)});
        for (int i = 0; i < 100; ++i) {
            const double rr = r(rng);
            const Complex z = std::polar(inside(rng) ? rr : 1.0 / rr, t(rng));
            const auto p = psi_eval(map, z);
            const auto m = psi_eval(map, -z);
            const auto g = psi_eval(map, -1.0 / std::conj(z));
            for (int j = 0; j < 2; ++j) {
                inversion = std::max(inversion, std::abs(p[j] * m[j] - 1.0));
                reality = std::max(reality, std::abs(g[j] - 1.0 / std::conj(p[j])) / std::max(1.0, std::abs(g[j])));
            }
        }
        for (const auto& f : map.factors) {
            const auto at_pole = fitted_pole_order(map, f.z);
            const auto at_zero = fitted_pole_order(map, -f.z);
            const std::array<double, 4> fitted{at_pole[0], at_pole[1], -at_zero[0], -at_zero[1]};
            const std::array<double, 4> expect{double(f.v.a), double(f.v.b), double(f.v.a), double(f.v.b)};
            for (int j = 0; j < 4; ++j) {
                order = std::max(order, std::abs(fitted[j] - expect[j]));
                exact = exact && std::llround(fitted[j]) == std::llround(expect[j]);
            }
        }
    }
    const bool ok = origin < 1e-8 && inversion < 1e-8 && reality < 1e-8 && order < 1e-8 && exact;
    return {ok, fmt("%zu maps: psi(0) %.2e, inversion %.2e, reality %.2e, pole-order fit %.2e (rounded orders %s)",
                    maps.size(), origin, inversion, reality, order, exact ? "exact" : "WRONG")};
}

// --- 8 ----------------------------------------------------------------------------------------

Outcome gibbons_hawking_regression()
{
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> t(0.0, 2.0 * pi), c(-4.0, 4.0), bd(-10.0, 10.0);
    std::uniform_int_distribution<int> kd(1, 8);
    const auto gh = gh3_data();
    double st = 0.0, inc = 0.0;
    for (int i = 0; i < 100; ++i) {
        st = std::max(st, gh_st_compare(gh, std::polar(2.0, t(rng))).residual);
        inc = std::max(inc, hitchin_incidence(gh, Complex(c(rng), c(rng))).relative);
    }
    int ordered = 0;
    double arg_err = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        GHData g{kd(rng), {}};
        for (int i = 0; i < g.k; ++i) g.b_values.push_back(bd(rng));
        std::sort(g.b_values.begin(), g.b_values.end());
        const auto z = gh_special_points(g);
        bool strict = true;
        for (std::size_t i = 0; i < z.size(); ++i) {
            // arg z_i = 2 arccot(beta_i^+)
            const double expect = 2.0 * std::atan2(1.0, beta_plus(g.b_values[i]));
            arg_err = std::max(arg_err, std::abs(std::arg(z[i]) - expect));
            strict = strict && std::arg(z[i]) > 0.0 && std::arg(z[i]) < pi;
            if (i > 0) strict = strict && std::arg(z[i]) < std::arg(z[i - 1]);
        }
        ordered += strict;
    }
    return {st < 1e-10 && inc < 1e-9 && ordered == 20 && arg_err < 1e-12,
            fmt("(s,t) forms %.3e at 100 points; incidence %.3e relative; %d/20 b-sets strictly ordered", st, inc,
                ordered)};
}

// --- 9 ----------------------------------------------------------------------------------------

Outcome combinatorial_invariants()
{
    int checks = 0, failures = 0;
    const auto expect = [&](bool ok) {
        ++checks;
        failures += !ok;
    };
    expect(orbifold_euler_characteristic(fans::s4()) == Rational(2));
    for (std::int64_t p = 1; p <= 12; ++p)
        expect(orbifold_euler_characteristic(fans::weighted_projective_plane(p)) == Rational(2) + Rational(1, p));
    for (std::int64_t k = 1; k <= 12; ++k)
        expect(orbifold_euler_characteristic(fans::gibbons_hawking(k)) == Rational(k) + Rational(1, k));
    for (std::int64_t p = 1; p <= 12; ++p) {
        const auto d = fundamental_group_data(fans::weighted_projective_plane(p));
        expect(d.simply_connected && d.deck_order == 1);
    }
    const auto q = fundamental_group_data(fans::s2xs2_mod_z2());
    expect(!q.simply_connected && q.deck_order == 2);
    return {failures == 0, fmt("%d exact checks (Euler characteristics, deck orders), %d failures", checks, failures)};
}

// --- 10 ---------------------------------------------------------------------------------------

Outcome boundary_degeneracy()
{
    std::mt19937_64 rng(110);
    auto all = core_fans();
    all.push_back({"HJ73", hirzebruch_jung_fan(7, 3)});
    double worst = 0.0;
    std::size_t segments = 0, offsets_fail = 0, perp_detected = 0;
    for (const auto& f : all) {
        const auto conf = random_conformal(rng, f.fan.size());
        bool perp_fails = false;
        for (std::size_t m = 0; m < f.fan.size(); ++m) {
            ++segments;
            try {
                const auto d = boundary_degeneracy_direction(f.fan, conf, m);
                worst = std::max(worst, d.angle);
                offsets_fail += !(d.parallel && d.angle < 1e-6);
            } catch (const ConvergenceError&) {
                ++offsets_fail;
            }
            try {
                perp_fails |= !boundary_degeneracy_direction(f.fan, conf, m, std::nullopt, {}, WeightConvention::perp)
                                   .parallel;
            } catch (const ConvergenceError&) {
                perp_fails = true;
            }
        }
        perp_detected += perp_fails;
    }
    return {offsets_fail == 0 && perp_detected == all.size(),
            fmt("offsets: %zu segments, max angle %.3e, %zu failures; perp rejected on %zu/%zu fans", segments, worst,
                offsets_fail, perp_detected, all.size())};
}

// --- 11 ---------------------------------------------------------------------------------------

Outcome polytope_geometry()
{
    std::mt19937_64 rng(111);
    auto named = core_fans();
    named.push_back({"HJ73", hirzebruch_jung_fan(7, 3)});
    double residual = 0.0, angle = 0.0;
    for (const auto& f : named) {
        const auto p = polytope_probe(f.fan, random_conformal(rng, f.fan.size()));
        residual = std::max(residual, p.max_line_residual);
        angle = std::max(angle, p.max_slope_angle);
    }
    int agree = 0, convex = 0;
    std::string first_mismatch;
    for (int n = 0; n < 200; ++n) {
        const auto fan = random_valid_fan(rng);
        const auto p = polytope_probe(fan, random_conformal(rng, fan.size()));
        const bool nd = negative_definite_check(fan).negative_definite;
        if (p.convex == nd) ++agree;
        else if (first_mismatch.empty()) first_mismatch = to_json(fan).dump();
        convex += nd;
        residual = std::max(residual, p.max_line_residual);
        angle = std::max(angle, p.max_slope_angle);
    }
    return {residual < 1e-8 && angle < 1e-8 && agree == 200,
            fmt("edge residual %.3e, slope angle %.3e; convexity verdict agrees on %d/200 random fans (%d negative "
                "definite)%s%s",
                residual, angle, agree, convex, first_mismatch.empty() ? "" : ", first mismatch ",
                first_mismatch.c_str())};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"PDE satisfaction", pde_satisfaction},
        {"derivative correctness", derivative_correctness},
        {"anti-self-duality", anti_self_duality},
        {"scalar-flat Kahler representative", scalar_flatness},
        {"Kahler form closedness", kahler_closedness},
        {"twistor/metric consistency", twistor_consistency},
        {"psi invariants", psi_invariants},
        {"Gibbons-Hawking regression", gibbons_hawking_regression},
        {"combinatorial invariants", combinatorial_invariants},
        {"boundary degeneracy", boundary_degeneracy},
        {"polytope geometry", polytope_geometry},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s [%2zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
