#ifndef ASDTORIC_CONFIG_HPP
#define ASDTORIC_CONFIG_HPP

// JSON serialization of fans, conformal data and torus maps, and the run
// configuration shared by the command-line tools.
//
//   fan        [[a, b], ...]
//   conformal  ["inf", zeta_2, ..., zeta_k]
//   map        {"factors": [{"z": [re, im], "v": [a, b]}, ...]}

#include "joyce.hpp"
#include "lattice.hpp"
#include "metric.hpp"
#include "twistor.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace asdtoric {

using Json = nlohmann::json;

/// Malformed or unreadable input; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- values --------------------------------------------------------------------------

inline Json to_json(const LatticeVector& u) { return Json::array({u.a, u.b}); }

inline Json to_json(const FanData& fan)
{
    Json out = Json::array();
    for (const auto& u : fan.rays) out.push_back(to_json(u));
    return out;
}

inline FanData fan_from_json(const Json& j)
{
    if (!j.is_array()) throw ConfigError("fan must be a JSON array of [a, b] pairs");
    FanData fan;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw ConfigError("fan entries must be 2-element integer arrays, got " + e.dump());
        fan.rays.push_back({e[0].get<std::int64_t>(), e[1].get<std::int64_t>()});
    }
    return fan;
}

inline Json to_json(const ConformalData& conf)
{
    Json out = Json::array();
    for (double z : conf.zetas) {
        if (std::isinf(z)) out.push_back("inf");
        else out.push_back(z);
    }
    return out;
}

inline ConformalData conformal_from_json(const Json& j)
{
    if (!j.is_array() || j.empty() || j[0] != "inf")
        throw ConfigError("conformal data must be a JSON array starting with \"inf\"");
    std::vector<double> finite;
    for (std::size_t i = 1; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError("conformal data entries after \"inf\" must be numbers");
        finite.push_back(j[i].get<double>());
    }
    return ConformalData::from_finite(finite);
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const MeromorphicTorusMap& map)
{
    Json f = Json::array();
    for (const auto& t : map.factors) f.push_back({{"z", to_json(t.z)}, {"v", to_json(t.v)}});
    return {{"factors", f}};
}

inline MeromorphicTorusMap map_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array())
        throw ConfigError("map must be an object with a \"factors\" array");
    MeromorphicTorusMap map;
    for (const auto& f : j["factors"]) {
        if (!f.contains("z") || !f.contains("v") || f["z"].size() != 2)
            throw ConfigError("map factor needs \"z\": [re, im] and \"v\": [a, b]");
        const auto v = fan_from_json(Json::array({f["v"]}));
        map.factors.push_back({Complex(f["z"][0].get<double>(), f["z"][1].get<double>()), v.rays[0]});
    }
    return map;
}

inline std::string to_string(const Rational& r)
{
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// --- run configuration ----------------------------------------------------------------

struct GridSpec {
    std::size_t nx = 16;
    std::size_t ny = 16;
    std::array<double, 2> x_range{-2.0, 2.0};
    std::array<double, 2> y_range{0.1, 2.0};
};

struct Tolerances {
    double pde = 1e-10;
    double closedness = 1e-10;
    double asd_ratio = 1e-4;
    double scalar = 1e-4;
    double richardson_order = 1.5;
    double crosscheck = 1e-8;
    double psi = 1e-8;
    double polytope = 1e-8;
    double angle = 1e-6;
    double gh = 1e-10;
    double incidence = 1e-9;

    std::map<std::string, double*> named()
    {
        return {{"pde", &pde},
                {"closedness", &closedness},
                {"asd_ratio", &asd_ratio},
                {"scalar", &scalar},
                {"richardson_order", &richardson_order},
                {"crosscheck", &crosscheck},
                {"psi", &psi},
                {"polytope", &polytope},
                {"angle", &angle},
                {"gh", &gh},
                {"incidence", &incidence}};
    }
};

struct RunConfig {
    FanData fan;
    std::optional<ConformalData> conformal; // default_conformal(k) when absent
    GridSpec grid;
    std::size_t samples = 20;
    std::uint64_t seed = 1;
    Tolerances tolerances;
    WeightConvention weights = WeightConvention::offsets;
    MetricScale scale = MetricScale::joyce;
    std::optional<GHData> gh;

    ConformalData conformal_data() const;
};

/// inf, 0, 1, ..., k - 2.
inline ConformalData default_conformal(std::size_t k)
{
    std::vector<double> finite;
    for (std::size_t i = 0; i + 1 < k; ++i) finite.push_back(double(i));
    return ConformalData::from_finite(finite);
}

inline ConformalData RunConfig::conformal_data() const { return conformal ? *conformal : default_conformal(fan.size()); }

inline WeightConvention weights_from_string(const std::string& s)
{
    if (s == "offsets") return WeightConvention::offsets;
    if (s == "perp") return WeightConvention::perp;
    throw ConfigError("weights must be \"offsets\" or \"perp\", got \"" + s + "\"");
}

inline MetricScale scale_from_string(const std::string& s)
{
    for (auto m : {MetricScale::joyce, MetricScale::height, MetricScale::kahler})
        if (to_string(m) == s) return m;
    throw ConfigError("scale must be joyce, height or kahler, got \"" + s + "\"");
}

inline void validate_config(const RunConfig& c)
{
    if (c.grid.nx < 1 || c.grid.ny < 1) throw ConfigError("grid needs nx, ny >= 1");
    if (!(c.grid.y_range[0] > 0.0) || !(c.grid.y_range[1] >= c.grid.y_range[0]))
        throw ConfigError("grid y_range must be strictly positive and ordered");
    if (!(c.grid.x_range[1] >= c.grid.x_range[0])) throw ConfigError("grid x_range must be ordered");
    if (c.samples < 1) throw ConfigError("samples must be >= 1");
}

namespace detail {

inline std::array<double, 2> range_from_json(const Json& j, const char* name)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(name) + " must be [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T get_as(const Json& j, const char* name)
{
    try {
        return j.get<T>();
    } catch (const Json::exception&) {
        throw ConfigError(std::string("bad value for \"") + name + "\": " + j.dump());
    }
}

} // namespace detail

/// Applies the fields present in `j` on top of `c`.
inline void merge_config(RunConfig& c, const Json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "fan") c.fan = fan_from_json(value);
        else if (key == "conformal") c.conformal = conformal_from_json(value);
        else if (key == "samples") {
            const auto n = detail::get_as<std::int64_t>(value, "samples");
            if (n < 1) throw ConfigError("samples must be >= 1");
            c.samples = std::size_t(n);
        } else if (key == "seed") c.seed = detail::get_as<std::uint64_t>(value, "seed");
        else if (key == "weights") c.weights = weights_from_string(detail::get_as<std::string>(value, "weights"));
        else if (key == "scale") c.scale = scale_from_string(detail::get_as<std::string>(value, "scale"));
        else if (key == "grid") {
            if (!value.is_object()) throw ConfigError("grid must be an object");
            for (const auto& [gk, gv] : value.items()) {
                if (gk == "nx") c.grid.nx = detail::get_as<std::size_t>(gv, "nx");
                else if (gk == "ny") c.grid.ny = detail::get_as<std::size_t>(gv, "ny");
                else if (gk == "x_range") c.grid.x_range = detail::range_from_json(gv, "x_range");
                else if (gk == "y_range") c.grid.y_range = detail::range_from_json(gv, "y_range");
                else throw ConfigError("unknown grid field \"" + gk + "\"");
            }
        } else if (key == "tolerances") {
            if (!value.is_object()) throw ConfigError("tolerances must be an object");
            auto named = c.tolerances.named();
            for (const auto& [tk, tv] : value.items()) {
                const auto it = named.find(tk);
                if (it == named.end()) throw ConfigError("unknown tolerance \"" + tk + "\"");
                *it->second = detail::get_as<double>(tv, tk.c_str());
            }
        } else if (key == "gh") {
            GHData gh;
            gh.k = detail::get_as<std::int64_t>(value.value("k", Json()), "gh.k");
            gh.b_values = detail::get_as<std::vector<double>>(value.value("b_values", Json()), "gh.b_values");
            c.gh = gh;
        } else if (key == "description") {
        } else {
            throw ConfigError("unknown config field \"" + key + "\"");
        }
    }
}

inline Json parse_json_text(const std::string& text, const std::string& origin)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("malformed JSON in " + origin + ": " + e.what());
    }
}

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline RunConfig config_from_json(const Json& j)
{
    RunConfig c;
    merge_config(c, j);
    validate_config(c);
    return c;
}

/// A fan file holds either a bare fan array or a config object with "fan".
inline FanData fan_from_document(const Json& j)
{
    if (j.is_array()) return fan_from_json(j);
    if (j.is_object() && j.contains("fan")) return fan_from_json(j["fan"]);
    throw ConfigError("expected a fan array or an object with \"fan\"");
}

inline Json to_json(const RunConfig& c)
{
    Json tol = Json::object();
    auto t = c.tolerances;
    for (const auto& [name, ptr] : t.named()) tol[name] = *ptr;
    Json j = {{"fan", to_json(c.fan)},
              {"conformal", to_json(c.conformal_data())},
              {"grid",
               {{"nx", c.grid.nx},
                {"ny", c.grid.ny},
                {"x_range", c.grid.x_range},
                {"y_range", c.grid.y_range}}},
              {"samples", c.samples},
              {"seed", c.seed},
              {"weights", to_string(c.weights)},
              {"scale", to_string(c.scale)},
              {"tolerances", tol}};
    if (c.gh) j["gh"] = {{"k", c.gh->k}, {"b_values", c.gh->b_values}};
    return j;
}

} // namespace asdtoric

#endif // ASDTORIC_CONFIG_HPP
