#ifndef ASDTORIC_COMMANDS_HPP
#define ASDTORIC_COMMANDS_HPP

// Command implementations behind the asdtoric tool. Each returns an exit code
// (0 ok, 1 verification failure, 2 usage or I/O error) and a JSON report.

#include "config.hpp"
#include "curvature.hpp"
#include "errors.hpp"
#include "joyce.hpp"
#include "lattice.hpp"
#include "metric.hpp"
#include "twistor.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

namespace asdtoric {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct CommandResult {
    int exit_code = kExitOk;
    Json report;
};

/// Runs body(i) for i in [0, n) on up to `threads` workers; results must be
/// written to per-index slots so output order does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = unsigned(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Uniform points in the grid's x and y ranges, drawn from the seeded generator.
inline std::vector<std::array<double, 2>> sample_points(const RunConfig& c, std::size_t n)
{
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> xs(c.grid.x_range[0], c.grid.x_range[1]);
    std::uniform_real_distribution<double> ys(c.grid.y_range[0], c.grid.y_range[1]);
    std::vector<std::array<double, 2>> out(n);
    for (auto& p : out) {
        p[0] = xs(rng);
        p[1] = ys(rng);
    }
    return out;
}

namespace detail {

inline Json base_report(const char* command, const RunConfig& c)
{
    return {{"command", command}, {"seed", c.seed}, {"config", to_json(c)}};
}

/// Maps exceptions escaping a command body to exit codes.
inline CommandResult guarded(const char* command, const std::function<CommandResult()>& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        return {kExitUsage, {{"command", command}, {"error", "config"}, {"message", e.what()}}};
    } catch (const ValidationError& e) {
        return {kExitUsage, {{"command", command}, {"error", "validation"}, {"message", e.what()}}};
    } catch (const std::invalid_argument& e) {
        return {kExitUsage, {{"command", command}, {"error", "argument"}, {"message", e.what()}}};
    } catch (const std::exception& e) {
        return {kExitFailed, {{"command", command}, {"error", "verification"}, {"message", e.what()}}};
    }
}

inline Json degeneracy_report(const FanData& fan, const ConformalData& conf, WeightConvention w, double angle_tol,
                              bool& ok)
{
    Json segs = Json::array();
    for (std::size_t m = 0; m < fan.size(); ++m) {
        Json s = {{"segment", m}, {"ray", to_json(fan.ray(m))}};
        try {
            const auto d = boundary_degeneracy_direction(fan, conf, m, std::nullopt, {}, w, angle_tol);
            s["limit"] = d.limit;
            s["angle"] = d.angle;
            s["parallel"] = d.parallel;
            s["extrapolation_error"] = d.extrapolation_error;
            ok = ok && d.parallel;
        } catch (const ConvergenceError& e) {
            s["parallel"] = false;
            s["error"] = e.what();
            ok = false;
        }
        segs.push_back(s);
    }
    return segs;
}

} // namespace detail

// --- validate --------------------------------------------------------------------------

inline CommandResult cmd_validate(const RunConfig& c)
{
    return detail::guarded("validate", [&] {
        Json r = detail::base_report("validate", c);
        const auto v = validate_fan(c.fan);
        Json violations = Json::array();
        for (const auto& e : v.violations) violations.push_back({{"index", e.index}, {"message", e.message}});
        r["valid"] = v.ok();
        r["violations"] = violations;
        r["notes"] = v.notes;
        if (!v.ok()) return CommandResult{kExitFailed, r};

        const auto o = orbifold_report(c.fan);
        Json offsets = Json::array();
        for (const auto& u : derive_offsets(c.fan).offsets) offsets.push_back(to_json(u));
        r["offsets"] = offsets;
        r["euler_char"] = to_string(orbifold_euler_characteristic(c.fan));
        r["edge_groups"] = o.edge_groups;
        r["vertex_groups"] = o.vertex_groups;
        r["simply_connected"] = o.simply_connected;
        r["deck_order"] = o.deck_order;
        r["negative_definite"] = o.negative_definite;
        r["orientation"] = o.orientation;
        r["vertex_values"] = o.vertex_values;
        const bool ok = o.deck_order >= 1 && o.euler_char > Rational(0);
        return CommandResult{ok ? kExitOk : kExitFailed, r};
    });
}

// --- solve ----------------------------------------------------------------------------

/// Evaluates the solution on the grid; writes CSV rows to `csv` when given.
inline CommandResult cmd_solve(const RunConfig& c, std::ostream* csv)
{
    return detail::guarded("solve", [&] {
        validate_config(c);
        require_valid(c.fan);
        const auto conf = c.conformal_data();
        validate_conformal(conf, c.fan.size());
        Json r = detail::base_report("solve", c);

        const auto& g = c.grid;
        const auto coord = [](const std::array<double, 2>& range, std::size_t i, std::size_t n) {
            return n == 1 ? 0.5 * (range[0] + range[1]) : range[0] + (range[1] - range[0]) * double(i) / double(n - 1);
        };
        struct Row {
            SolutionJet s;
            std::optional<MetricJet> m;
            double residual = 0.0;
            double det = 0.0;
        };
        const std::size_t n = g.nx * g.ny;
        std::vector<Row> rows(n);
        parallel_for(n, [&](std::size_t idx) {
            const std::size_t i = idx % g.nx, j = idx / g.nx;
            Row& row = rows[idx];
            row.s = solution_jet(c.fan, conf, coord(g.x_range, i, g.nx), coord(g.y_range, j, g.ny), c.weights);
            row.residual = pde_residual(row.s).max_abs();
            row.det = torus_determinant(row.s);
            try {
                row.m = scaled_metric_jet(row.s, c.scale);
            } catch (const SingularMetricError&) {
            }
        });

        if (csv) write_csv_header(*csv);
        double max_res = 0.0, min_det = INFINITY, max_det = -INFINITY;
        std::size_t singular = 0;
        for (const auto& row : rows) {
            max_res = std::max(max_res, row.residual);
            min_det = std::min(min_det, row.det);
            max_det = std::max(max_det, row.det);
            if (!row.m) {
                ++singular;
                continue;
            }
            if (csv) write_csv_row(*csv, row.s, *row.m);
        }

        bool parallel = true;
        r["boundary"] = detail::degeneracy_report(c.fan, conf, c.weights, c.tolerances.angle, parallel);
        const bool residual_ok = max_res < c.tolerances.pde;
        const int orientation = negative_definite_check(c.fan).orientation;
        r["points"] = n;
        r["rows_written"] = n - singular;
        r["singular_points"] = singular;
        r["max_pde_residual"] = max_res;
        r["min_det"] = min_det;
        r["max_det"] = max_det;
        r["det_sign_constant"] = min_det > 0.0 || max_det < 0.0;
        r["fan_orientation"] = orientation;
        r["weights"] = to_string(c.weights);
        r["residual_ok"] = residual_ok;
        r["boundary_ok"] = parallel;
        if (!parallel)
            r["diagnostic"] = "limit of Q along some boundary segment is not parallel to its stabilizer ray under "
                              + to_string(c.weights) + " weights";
        return CommandResult{residual_ok && parallel ? kExitOk : kExitFailed, r};
    });
}

// --- curvature -------------------------------------------------------------------------

inline CommandResult cmd_curvature(const RunConfig& c)
{
    return detail::guarded("curvature", [&] {
        validate_config(c);
        require_valid(c.fan);
        const auto conf = c.conformal_data();
        validate_conformal(conf, c.fan.size());
        Json r = detail::base_report("curvature", c);
        const int fan_orientation = negative_definite_check(c.fan).orientation;
        const auto pts = sample_points(c, c.samples);

        struct Slot {
            int orientation = 0;
            std::optional<WeylSplit> w;
            double flipped = 0.0;
            std::optional<ScalarFlatSample> s;
            std::string error;
        };
        std::vector<Slot> slots(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            auto& slot = slots[i];
            try {
                const auto sol = solution_jet(c.fan, conf, pts[i][0], pts[i][1], c.weights);
                const auto t = curvature_tensors(scaled_metric_jet(sol, MetricScale::joyce));
                slot.orientation = asd_orientation(sol);
                slot.w = weyl_split(t, slot.orientation);
                slot.flipped = weyl_split(t, -slot.orientation).asd_ratio();
                slot.s = scalar_flat_check(c.fan, conf, {pts[i]}).samples.front();
            } catch (const SingularMetricError& e) {
                slot.error = e.what();
            }
        });

        Json samples = Json::array();
        double max_ratio = 0.0, min_flipped = INFINITY, max_scalar = 0.0, max_fd = 0.0, min_order = INFINITY;
        std::size_t failures = 0, singular = 0, flat = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& slot = slots[i];
            Json s = {{"point", pts[i]}};
            if (!slot.w) {
                s["error"] = slot.error;
                ++singular;
                samples.push_back(s);
                continue;
            }
            const auto& w = *slot.w;
            const auto& sc = *slot.s;
            s["orientation"] = slot.orientation;
            s["scalar"] = sc.scalar;
            s["normalized_scalar"] = sc.normalized_scalar;
            s["fd_normalized_scalar"] = sc.fd_normalized_scalar;
            s["richardson_order"] = sc.richardson.order;
            s["weyl_sd_norm2"] = w.sd_norm2;
            s["weyl_asd_norm2"] = w.asd_norm2;
            s["asd_ratio"] = w.asd_ratio();
            s["flipped_asd_ratio"] = slot.flipped;
            s["conformally_flat"] = w.conformally_flat;
            samples.push_back(s);
            const bool ok = w.asd_ratio() <= c.tolerances.asd_ratio && sc.fd_normalized_scalar <= c.tolerances.scalar
                            && sc.normalized_scalar <= c.tolerances.scalar
                            && sc.richardson.order >= c.tolerances.richardson_order;
            if (!ok) ++failures;
            if (w.conformally_flat) ++flat;
            else min_flipped = std::min(min_flipped, slot.flipped);
            max_ratio = std::max(max_ratio, w.asd_ratio());
            max_scalar = std::max(max_scalar, sc.normalized_scalar);
            max_fd = std::max(max_fd, sc.fd_normalized_scalar);
            min_order = std::min(min_order, sc.richardson.order);
        }
        r["fan_orientation"] = fan_orientation;
        r["samples"] = samples;
        r["max_asd_ratio"] = max_ratio;
        r["min_flipped_asd_ratio"] = std::isfinite(min_flipped) ? Json(min_flipped) : Json(nullptr);
        r["max_normalized_scalar"] = max_scalar;
        r["max_fd_normalized_scalar"] = max_fd;
        r["min_richardson_order"] = std::isfinite(min_order) ? Json(min_order) : Json(nullptr);
        r["conformally_flat_samples"] = flat;
        r["singular_samples"] = singular;
        r["failed_samples"] = failures;
        return CommandResult{failures == 0 && singular == 0 ? kExitOk : kExitFailed, r};
    });
}

// --- polytope --------------------------------------------------------------------------

inline CommandResult cmd_polytope(const RunConfig& c)
{
    return detail::guarded("polytope", [&] {
        validate_config(c);
        const auto conf = c.conformal_data();
        const auto p = polytope_probe(c.fan, conf);
        const auto nd = negative_definite_check(c.fan);
        Json r = detail::base_report("polytope", c);
        Json edges = Json::array();
        for (const auto& e : p.edges)
            edges.push_back({{"segment", e.segment},
                             {"direction", e.direction},
                             {"line_residual", e.line_residual},
                             {"angle_to_stabilizer_perp", e.angle_to_stabilizer_perp},
                             {"unbounded", e.unbounded}});
        r["vertices"] = p.vertices;
        r["edges"] = edges;
        r["turning_signs"] = p.turning_signs;
        r["total_turning"] = p.total_turning;
        r["interior_samples"] = p.interior_samples;
        r["interior_outside"] = p.interior_outside;
        r["max_line_residual"] = p.max_line_residual;
        r["max_slope_angle"] = p.max_slope_angle;
        r["convex"] = p.convex;
        r["negative_definite"] = nd.negative_definite;
        r["notes"] = p.notes;
        const bool ok = p.max_line_residual < c.tolerances.polytope && p.max_slope_angle < c.tolerances.polytope
                        && p.convex == nd.negative_definite;
        r["consistent"] = ok;
        return CommandResult{ok ? kExitOk : kExitFailed, r};
    });
}

// --- twistor ----------------------------------------------------------------------------

inline CommandResult cmd_twistor(const RunConfig& c)
{
    return detail::guarded("twistor", [&] {
        validate_config(c);
        const auto conf = c.conformal_data();
        const auto map = build_map(c.fan, conf);
        Json r = detail::base_report("twistor", c);
        r["map"] = to_json(map);
        const auto& tol = c.tolerances;

        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> rad(0.05, 0.8), ang(0.0, 2.0 * std::numbers::pi), unit(0.0, 1.0);
        std::bernoulli_distribution inside(0.5);

        const auto p0 = psi_eval(map, 0.0);
        const double origin = std::max(std::abs(p0[0] - 1.0), std::abs(p0[1] - 1.0));
        double inversion = 0.0, reality = 0.0;
        for (std::size_t i = 0; i < c.samples; ++i) {
            const double rr = rad(rng);
            const Complex z = std::polar(inside(rng) ? rr : 1.0 / rr, ang(rng));
            const auto p = psi_eval(map, z);
            const auto m = psi_eval(map, -z);
            const auto g = psi_eval(map, -1.0 / std::conj(z));
            for (int j = 0; j < 2; ++j) {
                inversion = std::max(inversion, std::abs(p[j] * m[j] - 1.0));
                reality = std::max(reality, std::abs(g[j] - 1.0 / std::conj(p[j])) / std::max(1.0, std::abs(g[j])));
            }
        }
        double order_error = 0.0;
        Json orders = Json::array();
        for (const auto& f : map.factors) {
            const auto at_pole = fitted_pole_order(map, f.z);
            const auto at_zero = fitted_pole_order(map, -f.z);
            orders.push_back({{"pole", at_pole}, {"zero", at_zero}, {"expected", to_json(f.v)}});
            order_error = std::max({order_error, std::abs(at_pole[0] - double(f.v.a)), std::abs(at_pole[1] - double(f.v.b)),
                                    std::abs(at_zero[0] + double(f.v.a)), std::abs(at_zero[1] + double(f.v.b))});
        }
        const auto bal = degree_balance(map);

        double cross = 0.0;
        std::size_t branch_failures = 0;
        Json branch = Json::array();
        for (std::size_t i = 0; i < c.samples; ++i) {
            const Complex a = std::polar(0.9 * std::sqrt(unit(rng)), ang(rng));
            try {
                cross = std::max(cross, crosscheck_qp(c.fan, conf, a).residual);
            } catch (const BranchError& e) {
                ++branch_failures;
                branch.push_back({{"a", to_json(a)}, {"message", e.what()}});
            }
        }

        r["psi_origin_error"] = origin;
        r["max_inversion_error"] = inversion;
        r["max_reality_error"] = reality;
        r["fitted_orders"] = orders;
        r["max_order_error"] = order_error;
        r["degree_balance"] = bal;
        r["divisor_points"] = divisor(map).size();
        r["max_crosscheck_residual"] = cross;
        r["branch_failures"] = branch;
        const bool ok = origin < tol.psi && inversion < tol.psi && reality < tol.psi && order_error < tol.psi
                        && bal[0] == 0 && bal[1] == 0 && cross < tol.crosscheck && branch_failures == 0;
        return CommandResult{ok ? kExitOk : kExitFailed, r};
    });
}

// --- Gibbons-Hawking ------------------------------------------------------------------------

inline CommandResult cmd_gh(const GHData& gh, std::size_t samples = 100, std::uint64_t seed = 1,
                            const Tolerances& tol = {})
{
    return detail::guarded("gh", [&] {
        const auto z = gh_special_points(gh);
        const auto map = gh_map(gh);
        const auto conf = gh_conformal_data(gh);
        const auto fan = fans::gibbons_hawking(gh.k);
        Json r = {{"command", "gh"}, {"seed", seed}, {"k", gh.k}, {"b_values", gh.b_values}};
        Json pts = Json::array(), betas = Json::array();
        for (const auto& p : z) pts.push_back(to_json(p));
        for (double b : gh.b_values) betas.push_back({beta_plus(b), beta_minus(b)});
        r["special_points"] = pts;
        r["beta"] = betas;
        r["fan"] = to_json(fan);
        r["conformal"] = to_json(conf);
        r["map"] = to_json(map);

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi), c(-3.0, 3.0);
        double st = 0.0, hitchin = 0.0, incidence = 0.0, section = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const auto cmp = gh_st_compare(gh, std::polar(2.0, ang(rng)));
            st = std::max(st, cmp.residual);
            hitchin = std::max(hitchin, cmp.hitchin_residual);
            const Complex u(c(rng), c(rng));
            incidence = std::max(incidence, hitchin_incidence(gh, u).relative);
            section = std::max(section, gh_solution_residual(gh, u).max());
        }
        const auto generic = build_map(fan, conf);
        double map_diff = 0.0;
        for (std::size_t i = 0; i < map.factors.size(); ++i)
            map_diff = std::max(map_diff, std::abs(map.factors[i].z - generic.factors[i].z)
                                              + (map.factors[i].v == generic.factors[i].v ? 0.0 : 1.0));
        r["max_st_residual"] = st;
        r["max_hitchin_st_residual"] = hitchin;
        r["max_incidence_relative"] = incidence;
        r["max_section_residual"] = section;
        r["generic_map_difference"] = map_diff;
        const bool ok = st < tol.gh && hitchin < tol.gh && incidence < tol.incidence && section < tol.incidence
                        && map_diff < tol.gh;
        return CommandResult{ok ? kExitOk : kExitFailed, r};
    });
}

// --- resolve ------------------------------------------------------------------------------

inline CommandResult cmd_resolve(std::int64_t r_order, std::int64_t q)
{
    return detail::guarded("resolve", [&] {
        const auto cf = hirzebruch_jung_continued_fraction(r_order, q);
        const auto fan = hirzebruch_jung_fan(r_order, q);
        const auto o = orbifold_report(fan);
        Json r = {{"command", "resolve"}, {"r", r_order}, {"q", q}};
        r["continued_fraction"] = cf;
        r["fan"] = to_json(fan);
        r["conformal"] = to_json(default_conformal(fan.size()));
        r["euler_char"] = to_string(orbifold_euler_characteristic(fan));
        r["vertex_groups"] = o.vertex_groups;
        r["deck_order"] = o.deck_order;
        r["negative_definite"] = o.negative_definite;
        return CommandResult{o.negative_definite ? kExitOk : kExitFailed, r};
    });
}

} // namespace asdtoric

#endif // ASDTORIC_COMMANDS_HPP
