#include "cbh/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "cbh/solvers.hpp"

namespace cbh {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path + "." + key, "missing required field");
    return j.at(key);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
    return j.contains(key) ? as_number(j.at(key), path + "." + key) : fallback;
}

BathLabel parse_label(const std::string& s, const std::string& path) {
    if (s == "hot") return BathLabel::Hot;
    if (s == "cold") return BathLabel::Cold;
    if (s == "resonator") return BathLabel::Resonator;
    throw ConfigError(path, "unknown bath label '" + s + "' (expected hot|cold|resonator)");
}

FilterSpec parse_filter(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    FilterSpec f;
    f.center = as_number(require(j, "center", path), path + ".center");
    f.width = as_number(require(j, "width", path), path + ".width");
    if (j.contains("shape")) {
        const std::string s = as_string(j.at("shape"), path + ".shape");
        if (s == "ideal") f.shape = FilterShape::Ideal;
        else if (s == "lorentzian") f.shape = FilterShape::Lorentzian;
        else throw ConfigError(path + ".shape", "expected ideal|lorentzian");
    }
    if (j.contains("lamb_shift")) {
        const std::string s = as_string(j.at("lamb_shift"), path + ".lamb_shift");
        if (s == "zero") f.lamb_shift = LambShiftMode::Zero;
        else if (s == "numerical_pv") f.lamb_shift = LambShiftMode::NumericalPV;
        else throw ConfigError(path + ".lamb_shift", "expected zero|numerical_pv");
    }
    f.coupling = number_or(j, "coupling", path, 0.0);
    return f;
}

json filter_to_json(const FilterSpec& f) {
    return {{"center", f.center},
            {"width", f.width},
            {"shape", to_string(f.shape)},
            {"lamb_shift", to_string(f.lamb_shift)},
            {"coupling", f.coupling}};
}

std::vector<double> parse_grid(const json& j, const std::string& path) {
    if (j.contains("values")) {
        const json& v = j.at("values");
        if (!v.is_array()) throw ConfigError(path + ".values", "expected an array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + ".values[" + std::to_string(i) + "]"));
        return out;
    }
    for (const char* kind : {"log", "linear"}) {
        if (!j.contains(kind)) continue;
        const std::string p = path + "." + kind;
        const json& g = j.at(kind);
        const double from = as_number(require(g, "from", p), p + ".from");
        const double to = as_number(require(g, "to", p), p + ".to");
        const json& pts = require(g, "points", p);
        if (!pts.is_number_integer() || pts.get<int>() < 1) throw ConfigError(p + ".points", "expected an integer >= 1");
        const int n = pts.get<int>();
        if (std::string(kind) == "log") {
            if (!(from > 0.0) || !(to >= from)) throw ConfigError(p, "log grid needs 0 < from <= to");
            return log_grid(from, to, n);
        }
        std::vector<double> out;
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? from : from + (to - from) * i / (n - 1));
        return out;
    }
    throw ConfigError(path, "grid needs one of values|log|linear");
}

BathSpec& bath_by_name(RunConfig& c, const std::string& name, const std::string& path) {
    if (name == "hot") return c.baths.hot;
    if (name == "cold") return c.baths.cold;
    if (name == "resonator") return c.baths.resonator;
    throw ConfigError(path, "unknown bath '" + name + "'");
}

}  // namespace

double RunConfig::resonator_occupation() const {
    if (nbar_b) return *nbar_b;
    return baths.resonator.temperature > 0.0 ? bose_occupation(model.omega_b, baths.resonator.temperature) : 0.0;
}

void RunConfig::set_resonator_occupation(double nbar) {
    nbar_b = nbar;
    baths.resonator.temperature = temperature_for_occupation(model.omega_b, nbar);
}

const std::vector<std::string>& known_outputs() {
    static const std::vector<std::string> names{"mean_n", "p0", "p1", "p2", "p0_plus_p1", "g2_zero", "sigma_z",
                                                "gamma2_down", "gamma2_up"};
    return names;
}

RunConfig default_config() {
    RunConfig c;
    c.model = ModelParams{1.0, 0.05, 0.01, Variant::TlsResonator};
    c.baths.hot = BathSpec{BathLabel::Hot, 0.02, 2.0, FilterSpec{c.model.omega_minus(), 0.02}};
    c.baths.cold = BathSpec{BathLabel::Cold, 0.02, 0.0, FilterSpec{c.model.omega_a, 0.02}};
    c.baths.resonator = BathSpec{BathLabel::Resonator, 1e-7, 0.0, std::nullopt};
    c.set_resonator_occupation(5.0);
    c.me_variant = MeVariant::Filtered;
    c.outputs = {"mean_n"};
    return c;
}

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("$", "config must be a JSON object");
    RunConfig c = default_config();
    c.baths.hot.filter.reset();
    c.baths.cold.filter.reset();

    if (j.contains("model")) {
        const json& m = j.at("model");
        c.model.omega_a = number_or(m, "omega_a", "model", c.model.omega_a);
        c.model.omega_b = number_or(m, "omega_b", "model", c.model.omega_b);
        c.model.g = number_or(m, "g", "model", c.model.g);
        if (m.contains("variant")) {
            const std::string v = as_string(m.at("variant"), "model.variant");
            if (v == "tls_resonator") c.model.variant = Variant::TlsResonator;
            else if (v == "resonator_resonator") c.model.variant = Variant::ResonatorResonator;
            else throw ConfigError("model.variant", "expected tls_resonator|resonator_resonator");
        }
    }

    const json& baths = require(j, "baths", "$");
    if (!baths.is_array()) throw ConfigError("baths", "expected an array of three baths");
    std::vector<BathSpec> list;
    std::optional<double> nbar;
    std::set<BathLabel> seen;
    for (std::size_t i = 0; i < baths.size(); ++i) {
        const std::string path = "baths[" + std::to_string(i) + "]";
        const json& b = baths[i];
        BathSpec spec;
        spec.label = parse_label(as_string(require(b, "label", path), path + ".label"), path + ".label");
        if (!seen.insert(spec.label).second) {
            throw ConfigError(path + ".label", "duplicate " + to_string(spec.label) + " bath");
        }
        spec.kappa = as_number(require(b, "kappa", path), path + ".kappa");
        if (b.contains("nbar")) {
            if (spec.label != BathLabel::Resonator) throw ConfigError(path + ".nbar", "only the resonator bath accepts nbar");
            if (b.contains("temperature")) throw ConfigError(path, "give either temperature or nbar, not both");
            nbar = as_number(b.at("nbar"), path + ".nbar");
            if (*nbar < 0.0) throw ConfigError(path + ".nbar", "must be >= 0");
        } else {
            spec.temperature = as_number(require(b, "temperature", path), path + ".temperature");
        }
        if (b.contains("filter") && !b.at("filter").is_null()) spec.filter = parse_filter(b.at("filter"), path + ".filter");
        list.push_back(spec);
    }
    for (BathLabel l : {BathLabel::Hot, BathLabel::Cold, BathLabel::Resonator}) {
        if (!seen.count(l)) throw ConfigError("baths", "missing " + to_string(l) + " bath");
    }
    for (const BathSpec& b : list) {
        if (b.label == BathLabel::Hot) c.baths.hot = b;
        if (b.label == BathLabel::Cold) c.baths.cold = b;
        if (b.label == BathLabel::Resonator) c.baths.resonator = b;
    }
    c.nbar_b.reset();
    if (nbar) c.set_resonator_occupation(*nbar);

    if (j.contains("n_max") && !j.at("n_max").is_null()) {
        if (!j.at("n_max").is_number_integer()) throw ConfigError("n_max", "expected an integer");
        c.n_max = j.at("n_max").get<int>();
    }
    if (j.contains("me_variant")) {
        try {
            c.me_variant = parse_me_variant(as_string(j.at("me_variant"), "me_variant"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("me_variant", e.what());
        }
    }
    if (j.contains("include_hamiltonian")) {
        if (!j.at("include_hamiltonian").is_boolean()) throw ConfigError("include_hamiltonian", "expected a boolean");
        c.include_hamiltonian = j.at("include_hamiltonian").get<bool>();
    }
    if (j.contains("check_convergence")) {
        if (!j.at("check_convergence").is_boolean()) throw ConfigError("check_convergence", "expected a boolean");
        c.check_convergence = j.at("check_convergence").get<bool>();
    }
    if (j.contains("reduced")) {
        const json& r = j.at("reduced");
        if (r.contains("sigma_z")) {
            try {
                c.reduced.sigma_z = parse_sigma_z_interpretation(as_string(r.at("sigma_z"), "reduced.sigma_z"));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError("reduced.sigma_z", e.what());
            }
        }
        if (r.contains("rates")) {
            const json& rr = r.at("rates");
            ReducedRates rates;
            rates.gamma2_down = number_or(rr, "gamma2_down", "reduced.rates", 0.0);
            rates.gamma2_up = number_or(rr, "gamma2_up", "reduced.rates", 0.0);
            rates.gamma1_down = number_or(rr, "gamma1_down", "reduced.rates", 0.0);
            rates.gamma1_up = number_or(rr, "gamma1_up", "reduced.rates", 0.0);
            rates.gamma_deph = number_or(rr, "gamma_deph", "reduced.rates", 0.0);
            c.reduced.rates = rates;
        }
    }
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        const json& s = j.at("sweep");
        SweepSpec sw;
        sw.parameter = as_string(require(s, "parameter", "sweep"), "sweep.parameter");
        sw.values = parse_grid(s, "sweep");
        if (s.contains("nbar_b")) {
            const json& f = s.at("nbar_b");
            if (!f.is_array()) throw ConfigError("sweep.nbar_b", "expected an array");
            for (std::size_t i = 0; i < f.size(); ++i) {
                sw.nbar_families.push_back(as_number(f[i], "sweep.nbar_b[" + std::to_string(i) + "]"));
            }
        }
        c.sweep = sw;
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        if (!o.is_array()) throw ConfigError("outputs", "expected an array");
        c.outputs.clear();
        for (std::size_t i = 0; i < o.size(); ++i) c.outputs.push_back(as_string(o[i], "outputs[" + std::to_string(i) + "]"));
    }
    if (j.contains("output_path")) c.output_path = as_string(j.at("output_path"), "output_path");
    validate_config(c);
    return c;
}

json config_to_json(const RunConfig& c) {
    json baths = json::array();
    for (const BathSpec* b : {&c.baths.hot, &c.baths.cold, &c.baths.resonator}) {
        json jb{{"label", to_string(b->label)}, {"kappa", b->kappa}, {"temperature", b->temperature}};
        if (b->filter) jb["filter"] = filter_to_json(*b->filter);
        baths.push_back(jb);
    }
    json j{{"model",
            {{"omega_a", c.model.omega_a},
             {"omega_b", c.model.omega_b},
             {"g", c.model.g},
             {"variant", c.model.variant == Variant::TlsResonator ? "tls_resonator" : "resonator_resonator"}}},
           {"baths", baths},
           {"me_variant", to_string(c.me_variant)},
           {"include_hamiltonian", c.include_hamiltonian},
           {"check_convergence", c.check_convergence},
           {"reduced", {{"sigma_z", to_string(c.reduced.sigma_z)}}},
           {"outputs", c.outputs},
           {"output_path", c.output_path}};
    if (c.nbar_b) {
        // Keep the occupation as the source of truth so the file round-trips.
        j["baths"][2].erase("temperature");
        j["baths"][2]["nbar"] = *c.nbar_b;
    }
    j["n_max"] = c.n_max ? json(*c.n_max) : json(nullptr);
    if (c.reduced.rates) {
        const ReducedRates& r = *c.reduced.rates;
        j["reduced"]["rates"] = {{"gamma2_down", r.gamma2_down},
                                 {"gamma2_up", r.gamma2_up},
                                 {"gamma1_down", r.gamma1_down},
                                 {"gamma1_up", r.gamma1_up},
                                 {"gamma_deph", r.gamma_deph}};
    }
    if (c.sweep) {
        j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
        if (!c.sweep->nbar_families.empty()) j["sweep"]["nbar_b"] = c.sweep->nbar_families;
    }
    return j;
}

std::filesystem::path resolve_config_path(const std::filesystem::path& path) {
    if (path.is_absolute() || std::filesystem::exists(path)) return path;
    if (const char* dir = std::getenv("CBH_CONFIG_DIR")) {
        const std::filesystem::path alt = std::filesystem::path(dir) / path;
        if (std::filesystem::exists(alt)) return alt;
    }
    return path;
}

RunConfig load_config(const std::filesystem::path& path) {
    const std::filesystem::path p = resolve_config_path(path);
    std::ifstream in(p);
    if (!in) throw ConfigError("--config", "cannot open '" + p.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("parse error: ") + e.what());
    }
    return config_from_json(j);
}

void apply_parameter(RunConfig& c, const std::string& path, double value) {
    if (path == "n_max") {
        c.n_max = static_cast<int>(std::lround(value));
        return;
    }
    const auto dot = path.find('.');
    const std::string head = path.substr(0, dot);
    const std::string rest = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (head == "model") {
        if (rest == "omega_a") c.model.omega_a = value;
        else if (rest == "omega_b") c.model.omega_b = value;
        else if (rest == "g") c.model.g = value;
        else throw ConfigError(path, "unknown model parameter");
        if (rest == "omega_b" && c.nbar_b) c.set_resonator_occupation(*c.nbar_b);
        return;
    }
    if (head == "baths") {
        const auto dot2 = rest.find('.');
        if (dot2 == std::string::npos) throw ConfigError(path, "expected baths.<name>.<field>");
        const std::string name = rest.substr(0, dot2);
        const std::string field = rest.substr(dot2 + 1);
        if (name == "resonator" && field == "nbar") {
            c.set_resonator_occupation(value);
            return;
        }
        BathSpec& b = bath_by_name(c, name, path);
        if (field == "kappa") b.kappa = value;
        else if (field == "temperature") {
            b.temperature = value;
            if (name == "resonator") c.nbar_b.reset();
        } else if (field == "filter.center" && b.filter) b.filter->center = value;
        else if (field == "filter.width" && b.filter) b.filter->width = value;
        else if (field == "filter.coupling" && b.filter) b.filter->coupling = value;
        else throw ConfigError(path, "unknown or unavailable bath parameter");
        return;
    }
    throw ConfigError(path, "parameter path does not resolve to a real field");
}

double read_parameter(const RunConfig& c, const std::string& path) {
    RunConfig probe = c;
    // Resolve the path through the setter first so both accept the same names.
    apply_parameter(probe, path, 1.0);
    if (path == "n_max") return c.n_max ? *c.n_max : std::nan("");
    if (path == "model.omega_a") return c.model.omega_a;
    if (path == "model.omega_b") return c.model.omega_b;
    if (path == "model.g") return c.model.g;
    if (path == "baths.resonator.nbar") return c.resonator_occupation();
    const std::string rest = path.substr(6);
    const std::string name = rest.substr(0, rest.find('.'));
    const std::string field = rest.substr(rest.find('.') + 1);
    const BathSpec& b = name == "hot" ? c.baths.hot : name == "cold" ? c.baths.cold : c.baths.resonator;
    if (field == "kappa") return b.kappa;
    if (field == "temperature") return b.temperature;
    if (field == "filter.center") return b.filter->center;
    if (field == "filter.width") return b.filter->width;
    return b.filter->coupling;
}

void validate_config(const RunConfig& c) {
    auto wrap = [](const std::string& field, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(field, e.what());
        }
    };
    wrap("model", [&] { c.model.validate(); });
    wrap("baths.hot", [&] { c.baths.hot.validate(); });
    wrap("baths.cold", [&] { c.baths.cold.validate(); });
    wrap("baths.resonator", [&] { c.baths.resonator.validate(); });
    if (c.n_max && *c.n_max < 4) throw ConfigError("n_max", "must be >= 4");
    if (c.me_variant != MeVariant::Reduced && c.model.variant != Variant::TlsResonator) {
        throw ConfigError("model.variant", "master equations are built for the tls_resonator variant");
    }
    for (std::size_t i = 0; i < c.outputs.size(); ++i) {
        const auto& names = known_outputs();
        if (std::find(names.begin(), names.end(), c.outputs[i]) == names.end()) {
            throw ConfigError("outputs[" + std::to_string(i) + "]", "unknown observable '" + c.outputs[i] + "'");
        }
    }
    if (c.outputs.empty()) throw ConfigError("outputs", "at least one observable is required");
    if (c.sweep) {
        if (c.sweep->values.empty()) throw ConfigError("sweep.values", "sweep grid must be non-empty");
        for (double v : c.sweep->values) {
            if (!std::isfinite(v)) throw ConfigError("sweep.values", "sweep grid must be finite");
        }
        for (double v : c.sweep->nbar_families) {
            if (!std::isfinite(v) || v < 0.0) throw ConfigError("sweep.nbar_b", "occupations must be finite and >= 0");
        }
        RunConfig probe = c;
        apply_parameter(probe, c.sweep->parameter, c.sweep->values.front());
    }
    if (c.reduced.rates) {
        const ReducedRates& r = *c.reduced.rates;
        for (double v : {r.gamma2_down, r.gamma2_up, r.gamma1_down, r.gamma1_up, r.gamma_deph}) {
            if (v < 0.0) throw ConfigError("reduced.rates", "rates must be >= 0");
        }
    }
}

}  // namespace cbh
