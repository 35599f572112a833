#include "fcsdnn/io/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "fcsdnn/io/scenario.hpp"
#include "fcsdnn/util/binary.hpp"
#include "fcsdnn/util/error.hpp"

namespace fcsdnn::io {

namespace {

using nlohmann::json;

// Reads keys of one JSON object, rejecting anything it was not asked about.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }
    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError("unknown key " + where(k));
    }

    bool has(const std::string& k) {
        seen_.insert(k);
        return j_.contains(k);
    }

    template <class T>
    void get(const std::string& k, T& out) {
        if (!has(k)) return;
        try {
            out = j_.at(k).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("bad value for " + where(k) + ": " + e.what());
        }
    }

    const json& at(const std::string& k) {
        seen_.insert(k);
        return j_.at(k);
    }

    std::string where(const std::string& k = "") const {
        if (k.empty()) return path_.empty() ? "config" : path_;
        return path_.empty() ? k : path_ + "." + k;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

ClassifierKind classifier_from_string(const std::string& s) {
    if (s == "ann") return ClassifierKind::Ann;
    if (s == "decay") return ClassifierKind::Decay;
    throw ConfigError("unknown classifier '" + s + "' (expected ann or decay)");
}

} // namespace

const char* to_string(ClassifierKind k) { return k == ClassifierKind::Ann ? "ann" : "decay"; }

RunConfig parse_config(const json& j) {
    RunConfig c;
    {
        Section top(j, "");
        int version = -1;
        if (!top.has("schema_version")) throw ConfigError("missing schema_version");
        top.get("schema_version", version);
        if (version != kConfigSchemaVersion)
            throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                              std::to_string(kConfigSchemaVersion) + ")");
        top.get("scenario", c.scenario);
        top.get("mach", c.mach);
        top.get("final_time", c.final_time);
        top.get("shock_x", c.shock_x);
        top.get("max_steps", c.max_steps);

        if (top.has("geometry")) {
            Section g(top.at("geometry"), "geometry");
            g.get("h_bar", c.geometry.h_bar);
            g.get("n0", c.geometry.n0);
            g.get("nv", c.geometry.nv);
            g.get("nf", c.geometry.nf);
            if (g.has("box")) {
                std::array<double, 4> b{};
                g.get("box", b);
                c.box = b;
            }
            if (g.has("cylinder")) {
                std::array<double, 3> cyl{};
                g.get("cylinder", cyl);
                c.cylinder = cyl;
            }
        }
        if (top.has("solver")) {
            Section s(top.at("solver"), "solver");
            auto& p = c.solver;
            s.get("cfl", p.cfl);
            s.get("gamma", p.gamma);
            s.get("viscosity", p.viscosity);
            s.get("filter", p.filter);
            s.get("smear_initial", p.smear_initial);
            if (s.has("filter_params")) {
                Section f(s.at("filter_params"), "solver.filter_params");
                f.get("alpha", p.filter_params.alpha);
                f.get("order", p.filter_params.order);
            }
            if (s.has("smear")) {
                Section f(s.at("smear"), "solver.smear");
                f.get("alpha", p.smear.alpha);
                f.get("order", p.smear.order);
                f.get("c", p.smear.c);
                f.get("r", p.smear.r);
                f.get("threshold", p.smear.threshold);
            }
            if (s.has("viscosity_params")) {
                Section v(s.at("viscosity_params"), "solver.viscosity_params");
                v.get("window_r", p.visc.window_r);
                v.get("stride", p.visc.stride);
            }
            if (s.has("classifier")) {
                std::string k;
                s.get("classifier", k);
                c.classifier = classifier_from_string(k);
            }
            std::string model;
            s.get("model", model);
            c.model_path = model;
        }
        if (top.has("boundary")) c.boundary = solver::boundary_spec_from_json(top.at("boundary"));
        if (top.has("output")) {
            Section o(top.at("output"), "output");
            std::string dir = c.output.dir.string();
            o.get("dir", dir);
            c.output.dir = dir;
            o.get("snapshot_times", c.output.snapshot_times);
            o.get("snapshot_every", c.output.snapshot_every);
            o.get("csv", c.output.csv);
            o.get("standoff", c.output.standoff);
        }
    }
    validate_config(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = util::read_file(path);
    } catch (const Error& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["scenario"] = c.scenario;
    j["mach"] = c.mach;
    j["final_time"] = c.final_time;
    j["shock_x"] = c.shock_x;
    j["max_steps"] = c.max_steps;
    auto& g = j["geometry"];
    g["h_bar"] = c.geometry.h_bar;
    g["n0"] = c.geometry.n0;
    g["nv"] = c.geometry.nv;
    g["nf"] = c.geometry.nf;
    if (c.box) g["box"] = *c.box;
    if (c.cylinder) g["cylinder"] = *c.cylinder;
    auto& s = j["solver"];
    const auto& p = c.solver;
    s["cfl"] = p.cfl;
    s["gamma"] = p.gamma;
    s["viscosity"] = p.viscosity;
    s["filter"] = p.filter;
    s["smear_initial"] = p.smear_initial;
    s["filter_params"] = {{"alpha", p.filter_params.alpha}, {"order", p.filter_params.order}};
    s["smear"] = {{"alpha", p.smear.alpha}, {"order", p.smear.order}, {"c", p.smear.c},
                  {"r", p.smear.r},         {"threshold", p.smear.threshold}};
    s["viscosity_params"] = {{"window_r", p.visc.window_r}, {"stride", p.visc.stride}};
    s["classifier"] = to_string(c.classifier);
    s["model"] = c.model_path.string();
    if (c.boundary) j["boundary"] = solver::to_json(*c.boundary);
    j["output"] = {{"dir", c.output.dir.string()},
                   {"snapshot_times", c.output.snapshot_times},
                   {"snapshot_every", c.output.snapshot_every},
                   {"csv", c.output.csv},
                   {"standoff", c.output.standoff}};
    return j;
}

void validate_config(const RunConfig& c) {
    if (!is_known_scenario(c.scenario)) throw ConfigError("unknown scenario '" + c.scenario + "'");
    const auto& p = c.solver;
    if (!(p.cfl > 0.0) || !std::isfinite(p.cfl)) throw ConfigError("solver.cfl must be positive");
    if (!(p.gamma > 1.0)) throw ConfigError("solver.gamma must exceed 1");
    if (!(c.final_time >= 0.0) || !std::isfinite(c.final_time)) throw ConfigError("final_time must be >= 0");
    if (!(c.mach > 0.0)) throw ConfigError("mach must be positive");
    if (c.max_steps < 0) throw ConfigError("max_steps must be >= 0");
    if (!(p.filter_params.alpha > 0.0) || p.filter_params.order <= 0 || p.filter_params.order % 2)
        throw ConfigError("solver.filter_params: alpha > 0 and an even positive order required");
    if (!(p.smear.alpha > 0.0) || p.smear.order <= 0 || p.smear.order % 2 || p.smear.c <= 0 || p.smear.r < 0 ||
        p.smear.r >= p.smear.c || !(p.smear.threshold > 0.0))
        throw ConfigError("solver.smear: need alpha > 0, even order, 0 <= r < c, threshold > 0");
    if (c.geometry.h_bar < 0.0) throw ConfigError("geometry.h_bar must be >= 0");
    if (c.geometry.n0 < 2 * c.geometry.nv || c.geometry.nv < 1 || c.geometry.nf < 1 ||
        c.geometry.nf > c.geometry.nv)
        throw ConfigError("geometry: need nv >= 1, 1 <= nf <= nv and n0 >= 2 nv");
    if (c.box && !((*c.box)[2] > (*c.box)[0] && (*c.box)[3] > (*c.box)[1]))
        throw ConfigError("geometry.box must be {lo_x, lo_y, hi_x, hi_y} with lo < hi");
    if (c.cylinder && !((*c.cylinder)[2] > 0.0)) throw ConfigError("geometry.cylinder radius must be positive");
    for (double t : c.output.snapshot_times)
        if (!(t > 0.0)) throw ConfigError("output.snapshot_times must be positive");
    if (c.output.snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");
}

std::string config_hash(const RunConfig& c) {
    // FNV-1a over the canonical dump (object keys are sorted).
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : to_json(c).dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace fcsdnn::io
