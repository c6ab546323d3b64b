#include <asdtoric/curvature.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace asdtoric;
using Catch::Approx;

namespace {

// (dx^2 + dy^2)/y^2 + dth_1^2 + dth_2^2
MetricJet hyperbolic_times_flat(double x, double y)
{
    const Jet2 Y = Jet2::coordinate(y, 1);
    ComponentJets c{};
    c[0][0] = c[1][1] = reciprocal(Y * Y);
    c[2][2] = c[3][3] = Jet2::constant(1.0);
    return metric_from_components(c, x, y);
}

std::vector<std::array<double, 2>> random_points(std::mt19937_64& rng, int n, double xlo = -2, double xhi = 2,
                                                 double ylo = 0.1, double yhi = 2)
{
    std::uniform_real_distribution<double> xs(xlo, xhi), ys(ylo, yhi);
    std::vector<std::array<double, 2>> out;
    for (int i = 0; i < n; ++i) out.push_back({xs(rng), ys(rng)});
    return out;
}

struct Case {
    const char* name;
    FanData fan;
    ConformalData conf;
};

std::vector<Case> curved_cases()
{
    return {{"gh2", fans::gibbons_hawking(2), ConformalData::from_finite({0.0, 1.0})},
            {"gh3", fans::gibbons_hawking(3), ConformalData::from_finite({-1.0, 0.0, 1.5})},
            {"cp113", fans::weighted_projective_plane(3), ConformalData::from_finite({-0.5, 0.7})},
            {"hj73", hirzebruch_jung_fan(7, 3), ConformalData::from_finite({-1.0, 0.0, 0.5, 2.0})}};
}

double max_abs(const Tensor4& t)
{
    double m = 0.0;
    for (const auto& a : t)
        for (const auto& b : a)
            for (const auto& c : b)
                for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("flat metric has no curvature")
{
    MetricJet m;
    m.g.setIdentity();
    const auto t = curvature_tensors(m);
    CHECK(max_abs(t.riemann) == 0.0);
    CHECK(t.ricci.isZero(0.0));
    CHECK(t.scalar == 0.0);
    const auto w = weyl_split(t, 1);
    CHECK(w.sd_norm2 == 0.0);
    CHECK(w.asd_norm2 == 0.0);
    CHECK(w.asd_ratio() == 0.0);

    const MetricField flat = [](double x, double y) {
        MetricJet j;
        j.coords = {x, y, 0, 0};
        j.g.setIdentity();
        return j;
    };
    CHECK(curvature_tensors_fd(flat, 0.0, 1.0, 1e-4).scalar == 0.0);
}

TEST_CASE("hyperbolic plane block has scalar curvature -2")
{
    for (double y : {0.1, 0.5, 1.0, 3.0}) {
        const auto t = curvature_tensors(hyperbolic_times_flat(0.3, y));
        CHECK(t.scalar == Approx(-2.0).epsilon(1e-12));
        // Ric = -g on the hyperbolic block, 0 on the torus
        CHECK(t.ricci(0, 0) == Approx(-1.0 / (y * y)));
        CHECK(t.ricci(1, 1) == Approx(-1.0 / (y * y)));
        CHECK(t.ricci(2, 2) == Approx(0.0).margin(1e-14));
        CHECK(curvature_tensors_fd(hyperbolic_times_flat, 0.3, y, 1e-4 * y).scalar == Approx(-2.0).epsilon(1e-6));
    }
}

TEST_CASE("analytic and finite-difference curvature agree")
{
    std::mt19937_64 rng(1);
    for (const auto& c : curved_cases()) {
        for (auto scale : {MetricScale::joyce, MetricScale::kahler}) {
            const auto field = metric_field(c.fan, c.conf, scale);
            for (const auto& p : random_points(rng, 10)) {
                const auto a = curvature_tensors(field(p[0], p[1]));
                const auto f = curvature_tensors_fd(field, p[0], p[1], 1e-4 * p[1]);
                const double scale_r = max_abs(a.riemann);
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        for (int k = 0; k < 4; ++k)
                            for (int l = 0; l < 4; ++l)
                                REQUIRE(std::abs(a.riemann[i][j][k][l] - f.riemann[i][j][k][l]) < 1e-6 * scale_r);
            }
        }
    }
}

TEST_CASE("Riemann symmetries and first Bianchi identity")
{
    std::mt19937_64 rng(2);
    for (const auto& c : curved_cases()) {
        const auto field = metric_field(c.fan, c.conf, MetricScale::joyce);
        for (const auto& p : random_points(rng, 20)) {
            const auto t = curvature_tensors(field(p[0], p[1]));
            REQUIRE(bianchi_residual(t) < 1e-6);
            REQUIRE(bianchi_residual(curvature_tensors_fd(field, p[0], p[1], 1e-4 * p[1])) < 1e-6);
            const double s = max_abs(t.riemann);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    for (int cc = 0; cc < 4; ++cc)
                        for (int d = 0; d < 4; ++d) {
                            REQUIRE(std::abs(t.riemann[a][b][cc][d] + t.riemann[b][a][cc][d]) <= 1e-12 * s);
                            REQUIRE(std::abs(t.riemann[a][b][cc][d] - t.riemann[cc][d][a][b]) <= 1e-12 * s);
                        }
        }
    }
}

TEST_CASE("Weyl tensor is trace free")
{
    std::mt19937_64 rng(3);
    for (const auto& c : curved_cases()) {
        for (auto scale : {MetricScale::joyce, MetricScale::kahler}) {
            const auto field = metric_field(c.fan, c.conf, scale);
            for (const auto& p : random_points(rng, 10)) REQUIRE(weyl_trace_residual(curvature_tensors(field(p[0], p[1]))) < 1e-8);
        }
    }
}

TEST_CASE("the two-point Joyce metric is conformally flat")
{
    std::mt19937_64 rng(4);
    const auto f = fans::s4();
    for (double zeta : {-1.0, 0.0, 0.8}) {
        const auto conf = ConformalData::from_finite({zeta});
        for (const auto& p : random_points(rng, 10)) {
            for (int o : {1, -1}) {
                const auto t = curvature_tensors(conformal_metric_jet(f, conf, p[0], p[1]));
                const auto w = weyl_split(t, o);
                REQUIRE(w.sd_norm2 < 1e-6 * w.riemann_norm2);
                REQUIRE(w.asd_norm2 < 1e-6 * w.riemann_norm2);
                REQUIRE(w.conformally_flat);
                REQUIRE(w.asd_ratio() == 0.0);
            }
        }
    }
}

TEST_CASE("orientation flip swaps the norms exactly")
{
    std::mt19937_64 rng(5);
    for (const auto& c : curved_cases()) {
        for (const auto& p : random_points(rng, 5)) {
            const auto t = curvature_tensors(conformal_metric_jet(c.fan, c.conf, p[0], p[1]));
            const auto a = weyl_split(t, 1);
            const auto b = weyl_split(t, -1);
            REQUIRE(a.sd_norm2 == b.asd_norm2);
            REQUIRE(a.asd_norm2 == b.sd_norm2);
            REQUIRE(a.sd_norm2 + a.asd_norm2 == Approx(a.weyl_norm2).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(weyl_split(curvature_tensors(hyperbolic_times_flat(0, 1)), 0), ValidationError);
}

TEST_CASE("Joyce metrics are anti-self-dual in exactly one orientation")
{
    std::mt19937_64 rng(6);
    for (const auto& c : curved_cases()) {
        const int fan_orientation = negative_definite_check(c.fan).orientation;
        const int canonical = asd_orientation(fan_orientation);
        INFO(c.name);
        for (const auto& p : random_points(rng, 20)) {
            const auto t = curvature_tensors(conformal_metric_jet(c.fan, c.conf, p[0], p[1]));
            const auto w = weyl_split(t, canonical);
            REQUIRE_FALSE(w.conformally_flat);
            REQUIRE(w.asd_ratio() < 1e-6);
            REQUIRE(weyl_split(t, -canonical).asd_ratio() > 0.5);
        }
    }
}

TEST_CASE("pointwise orientation follows the torus determinant")
{
    std::mt19937_64 rng(11);
    auto cases = curved_cases();
    cases.push_back({"s2xs2", fans::s2xs2_mod_z2(), ConformalData::from_finite({-1.0, 0.0, 1.0})});
    for (const auto& c : cases) {
        const int fan_orientation = negative_definite_check(c.fan).orientation;
        INFO(c.name);
        int seen_pos = 0, seen_neg = 0;
        for (const auto& p : random_points(rng, 30)) {
            const auto s = solution_jet(c.fan, c.conf, p[0], p[1]);
            const int o = asd_orientation(s);
            if (fan_orientation != 0) REQUIRE(o == asd_orientation(fan_orientation));
            (o > 0 ? seen_pos : seen_neg)++;
            const auto t = curvature_tensors(scaled_metric_jet(s, MetricScale::joyce));
            REQUIRE(weyl_split(t, o).asd_ratio() < 1e-6);
            REQUIRE(weyl_split(t, -o).asd_ratio() > 0.5);
        }
        // mixed vertex signs: both determinant signs occur in the half-plane
        if (fan_orientation == 0) CHECK((seen_pos > 0 && seen_neg > 0));
    }
}

TEST_CASE("ASD verdict is conformally invariant")
{
    std::mt19937_64 rng(7);
    for (const auto& c : curved_cases()) {
        const int o = asd_orientation(negative_definite_check(c.fan).orientation);
        for (const auto& p : random_points(rng, 10)) {
            const auto s = solution_jet(c.fan, c.conf, p[0], p[1]);
            std::array<double, 3> ratios{}, flipped{};
            int i = 0;
            for (auto scale : {MetricScale::joyce, MetricScale::height, MetricScale::kahler}) {
                const auto t = curvature_tensors(scaled_metric_jet(s, scale));
                ratios[i] = weyl_split(t, o).asd_ratio();
                flipped[i] = weyl_split(t, -o).asd_ratio();
                ++i;
            }
            for (int j = 0; j < 3; ++j) {
                REQUIRE(ratios[j] < 1e-6);
                REQUIRE(std::abs(ratios[j] - ratios[0]) < 1e-5);
                REQUIRE(std::abs(flipped[j] - flipped[0]) < 1e-5);
            }
        }
    }
}

TEST_CASE("Kahler representative is scalar flat")
{
    std::mt19937_64 rng(8);
    const auto pts = random_points(rng, 20);
    const auto gh = fans::gibbons_hawking(3);
    const auto conf = ConformalData::from_finite({-1.0, 0.0, 1.5});
    const auto rep = scalar_flat_check(gh, conf, pts);
    REQUIRE(rep.samples.size() == 20);
    CHECK(rep.max_normalized_scalar < 1e-10);
    CHECK(rep.max_fd_normalized_scalar < 1e-4);
    CHECK(rep.all_converged);
    CHECK(rep.min_order >= 1.5);

    // the multiplier matters: the Joyce representative is not scalar flat
    const auto joyce = scalar_flat_check(gh, conf, pts, kDefaultRelativeStep, MetricScale::joyce);
    for (const auto& s : joyce.samples) CHECK(std::abs(s.scalar) > 1e-2);
}

TEST_CASE("scalar-flat check on other fans")
{
    std::mt19937_64 rng(9);
    for (const auto& c : curved_cases()) {
        const auto rep = scalar_flat_check(c.fan, c.conf, random_points(rng, 5));
        INFO(c.name);
        CHECK(rep.max_normalized_scalar < 1e-10);
        CHECK(rep.max_fd_normalized_scalar < 1e-4);
        CHECK(rep.all_converged);
    }
    const auto s4 = scalar_flat_check(fans::s4(), ConformalData::from_finite({0.0}), random_points(rng, 5));
    CHECK(s4.max_normalized_scalar < 1e-10);
}

TEST_CASE("halving the step is consistent with the truncation estimate")
{
    std::mt19937_64 rng(10);
    const auto gh = fans::gibbons_hawking(3);
    const auto conf = ConformalData::from_finite({-1.0, 0.0, 1.5});
    const auto field = metric_field(gh, conf, MetricScale::joyce);
    const int o = asd_orientation(1);
    for (const auto& p : random_points(rng, 20)) {
        const double h = kRichardsonRelativeStep * p[1];
        const auto r = richardson(
            [&](double step) {
                const auto t = curvature_tensors_fd(field, p[0], p[1], step);
                return std::sqrt(weyl_split(t, o).sd_norm2);
            },
            h);
        INFO("values " << r.values[0] << " " << r.values[1] << " " << r.values[2]);
        REQUIRE(std::abs(r.values[1] - r.values[2]) < 10.0 * r.truncation_estimate);
        REQUIRE(r.order >= 1.5);
    }
}

TEST_CASE("non positive-definite metrics are rejected")
{
    MetricJet m;
    m.g = Eigen::Vector4d(1, -1, 1, 1).asDiagonal();
    CHECK_THROWS_AS(curvature_tensors(m), SingularMetricError);
    m.g.setZero();
    CHECK_THROWS_AS(curvature_tensors(m), SingularMetricError);
}
