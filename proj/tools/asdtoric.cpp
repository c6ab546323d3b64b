// asdtoric: construct and verify torus-symmetric ASD metrics from a fan and
// conformal data. Reports are JSON on stdout (or --report); exit codes are
// 0 ok, 1 verification failure, 2 usage or I/O error.

#include <asdtoric/asdtoric.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace asdtoric;

namespace {

struct Overrides {
    std::string config_path;
    std::string fan_path;
    std::string fan_json;
    std::string conformal_json;
    std::string report_path;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> weights;
    std::optional<std::string> scale;
    std::optional<std::size_t> nx, ny;
    std::vector<double> x_range, y_range;
    std::vector<std::string> tolerances;
};

const char* kDefaults = R"(Config file (JSON object, all fields optional except fan):
  fan         [[a,b],...]                       lattice rays u_1..u_k
  conformal   ["inf", z2, ..., zk]               default ["inf", 0, 1, ..., k-2]
  grid        {"nx":16, "ny":16, "x_range":[-2,2], "y_range":[0.1,2]}
  samples     20          seed  1
  weights     "offsets" | "perp"                 default offsets
  scale       "joyce" | "height" | "kahler"       default joyce (solve CSV only)
  tolerances  {"pde":1e-10, "closedness":1e-10, "asd_ratio":1e-4, "scalar":1e-4,
               "richardson_order":1.5, "crosscheck":1e-8, "psi":1e-8,
               "polytope":1e-8, "angle":1e-6, "gh":1e-10, "incidence":1e-9}
Flags override config fields. Exit codes: 0 ok, 1 verification failure, 2 usage/I-O error.)";

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("--config", o.config_path, "JSON run configuration");
    sub->add_option("--fan", o.fan_path, "JSON file with a fan array (or a config holding one)");
    sub->add_option("--fan-json", o.fan_json, "fan as inline JSON, e.g. [[1,0],[0,1]]");
    sub->add_option("--conformal-json", o.conformal_json, "conformal data as inline JSON, e.g. [\"inf\",0]");
    sub->add_option("--samples", o.samples, "number of random samples");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--weights", o.weights, "solution weights")->check(CLI::IsMember({"offsets", "perp"}));
    sub->add_option("--scale", o.scale, "metric representative")->check(CLI::IsMember({"joyce", "height", "kahler"}));
    sub->add_option("--nx", o.nx, "grid points in x");
    sub->add_option("--ny", o.ny, "grid points in y");
    sub->add_option("--x-range", o.x_range, "grid x range: LO HI")->expected(2);
    sub->add_option("--y-range", o.y_range, "grid y range: LO HI")->expected(2);
    sub->add_option("--tol", o.tolerances, "tolerance override NAME=VALUE (repeatable)");
    sub->add_option("--report", o.report_path, "write the JSON report here instead of stdout");
}

RunConfig assemble(const Overrides& o)
{
    RunConfig c;
    if (!o.config_path.empty()) merge_config(c, read_json_file(o.config_path));
    if (!o.fan_path.empty()) c.fan = fan_from_document(read_json_file(o.fan_path));
    if (!o.fan_json.empty()) c.fan = fan_from_json(parse_json_text(o.fan_json, "--fan-json"));
    if (!o.conformal_json.empty())
        c.conformal = conformal_from_json(parse_json_text(o.conformal_json, "--conformal-json"));
    Json j = Json::object();
    if (o.samples) j["samples"] = *o.samples;
    if (o.seed) j["seed"] = *o.seed;
    if (o.weights) j["weights"] = *o.weights;
    if (o.scale) j["scale"] = *o.scale;
    Json grid = Json::object();
    if (o.nx) grid["nx"] = *o.nx;
    if (o.ny) grid["ny"] = *o.ny;
    if (!o.x_range.empty()) grid["x_range"] = o.x_range;
    if (!o.y_range.empty()) grid["y_range"] = o.y_range;
    if (!grid.empty()) j["grid"] = grid;
    Json tol = Json::object();
    for (const auto& t : o.tolerances) {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("--tol expects NAME=VALUE, got " + t);
        try {
            tol[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
        } catch (const std::logic_error&) {
            throw ConfigError("--tol value is not a number: " + t);
        }
    }
    if (!tol.empty()) j["tolerances"] = tol;
    merge_config(c, j);
    if (c.fan.rays.empty()) throw ConfigError("no fan given (use --config, --fan or --fan-json)");
    validate_config(c);
    return c;
}

int emit(const CommandResult& r, const std::string& path)
{
    const std::string text = r.report.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(path);
        if (!out || !(out << text)) {
            std::cerr << "cannot write report to " << path << "\n";
            return kExitUsage;
        }
    }
    if (r.report.contains("message")) std::cerr << r.report["message"].get<std::string>() << "\n";
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Toric anti-self-dual metrics: construction and verification"};
    app.footer(kDefaults);
    app.require_subcommand(1);

    Overrides o;
    std::string csv_path;
    GHData gh;
    std::size_t gh_samples = 100;
    std::uint64_t gh_seed = 1;
    std::int64_t res_r = 0, res_q = 0;

    auto* validate = app.add_subcommand("validate", "fan validation and orbifold invariants");
    auto* solve = app.add_subcommand("solve", "evaluate the solution and metric on a grid");
    auto* curvature = app.add_subcommand("curvature", "anti-self-duality and scalar-flatness at random points");
    auto* polytope = app.add_subcommand("polytope", "moment polytope edges and convexity");
    auto* twistor = app.add_subcommand("twistor", "psi invariants and the twistor/metric cross-check");
    for (auto* s : {validate, solve, curvature, polytope, twistor}) add_common(s, o);
    solve->add_option("--out", csv_path, "CSV output path (grid rows are skipped when absent)");

    auto* ghcmd = app.add_subcommand("gh", "Gibbons-Hawking special points and (s, t) checks");
    ghcmd->add_option("--k", gh.k, "number of centres")->required();
    ghcmd->add_option("--b", gh.b_values, "strictly increasing b-values")->required();
    ghcmd->add_option("--samples", gh_samples, "random evaluation points")->capture_default_str();
    ghcmd->add_option("--seed", gh_seed, "random seed")->capture_default_str();
    ghcmd->add_option("--report", o.report_path, "write the JSON report here instead of stdout");

    auto* resolve = app.add_subcommand("resolve", "Hirzebruch-Jung resolution fan of C^2/Z_r(1,q)");
    resolve->add_option("--r", res_r, "group order")->required();
    resolve->add_option("--q", res_q, "weight, coprime to r")->required();
    resolve->add_option("--report", o.report_path, "write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (ghcmd->parsed()) return emit(cmd_gh(gh, gh_samples, gh_seed), o.report_path);
        if (resolve->parsed()) return emit(cmd_resolve(res_r, res_q), o.report_path);

        const RunConfig c = assemble(o);
        if (validate->parsed()) return emit(cmd_validate(c), o.report_path);
        if (curvature->parsed()) return emit(cmd_curvature(c), o.report_path);
        if (polytope->parsed()) return emit(cmd_polytope(c), o.report_path);
        if (twistor->parsed()) return emit(cmd_twistor(c), o.report_path);
        if (solve->parsed()) {
            if (csv_path.empty()) return emit(cmd_solve(c, nullptr), o.report_path);
            std::ofstream csv(csv_path);
            if (!csv) {
                std::cerr << "cannot open " << csv_path << "\n";
                return kExitUsage;
            }
            const auto r = cmd_solve(c, &csv);
            csv.flush();
            if (!csv) {
                std::cerr << "error writing " << csv_path << "\n";
                return kExitUsage;
            }
            return emit(r, o.report_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
