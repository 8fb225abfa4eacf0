#include "shotnoise/config.hpp"

#include <fstream>
#include <sstream>

namespace shotnoise::config {

using nlohmann::json;

namespace {

const json& expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    return j;
}

} // namespace

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError("missing or non-numeric key '" + key + "'");
    return j.at(key).get<double>();
}

std::int64_t require_integer(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw ConfigError("missing or non-integer key '" + key + "'");
    return j.at(key).get<std::int64_t>();
}

std::string require_string(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ConfigError("missing or non-string key '" + key + "'");
    return j.at(key).get<std::string>();
}

void require_keys_subset(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

kernels::TimeFunction build_time_function(const json& spec, double extra_scale) {
    expect_object(spec, "time profile");
    const std::string family = require_string(spec, "family");
    using TF = kernels::TimeFunction;
    if (family == "exponential") {
        require_keys_subset(spec, {"family", "scale", "beta"}, "time profile");
        const double scale = spec.contains("scale") ? require_number(spec, "scale") : 1.0;
        return TF::exponential(scale * extra_scale, require_number(spec, "beta"));
    }
    if (family == "power") {
        require_keys_subset(spec, {"family", "scale", "beta"}, "time profile");
        const double scale = spec.contains("scale") ? require_number(spec, "scale") : 1.0;
        return TF::power(scale * extra_scale, require_number(spec, "beta"));
    }
    if (family == "affine") {
        require_keys_subset(spec, {"family", "c0", "c1"}, "time profile");
        return TF::affine(require_number(spec, "c0") * extra_scale,
                          require_number(spec, "c1") * extra_scale);
    }
    if (family == "quadratic") {
        require_keys_subset(spec, {"family", "c0", "c1", "c2"}, "time profile");
        return TF::quadratic(require_number(spec, "c0") * extra_scale,
                             require_number(spec, "c1") * extra_scale,
                             require_number(spec, "c2") * extra_scale);
    }
    if (family == "indicator") {
        require_keys_subset(spec, {"family", "scale", "t0"}, "time profile");
        const double scale = spec.contains("scale") ? require_number(spec, "scale") : 1.0;
        return TF::indicator(scale * extra_scale, require_number(spec, "t0"));
    }
    if (family == "piecewise") {
        require_keys_subset(spec, {"family", "edges", "values"}, "time profile");
        if (!spec.contains("edges") || !spec.contains("values"))
            throw ConfigError("piecewise profile: needs 'edges' and 'values'");
        auto edges = spec.at("edges").get<std::vector<double>>();
        auto values = spec.at("values").get<std::vector<double>>();
        for (auto& v : values) v *= extra_scale;
        return TF::piecewise_constant(std::move(edges), std::move(values));
    }
    throw ConfigError("unknown time profile family '" + family + "'");
}

kernels::Kernel build_kernel(const json& spec, double extra_scale) {
    expect_object(spec, "kernel");
    const std::string family = require_string(spec, "family");
    using K = kernels::Kernel;
    if (family == "zero") {
        require_keys_subset(spec, {"family"}, "kernel");
        return K::zero();
    }
    if (family == "product_exp") {
        require_keys_subset(spec, {"family", "beta"}, "kernel");
        return K::product(kernels::TimeFunction::exponential(
            extra_scale, require_number(spec, "beta")));
    }
    if (family == "product_power") {
        require_keys_subset(spec, {"family", "beta"}, "kernel");
        return K::product(kernels::TimeFunction::power(extra_scale,
                                                       require_number(spec, "beta")));
    }
    if (family == "product") {
        require_keys_subset(spec, {"family", "g"}, "kernel");
        if (!spec.contains("g")) throw ConfigError("product kernel: needs 'g'");
        return K::product(build_time_function(spec.at("g"), extra_scale));
    }
    if (family == "monomial") {
        require_keys_subset(spec, {"family", "q", "g"}, "kernel");
        if (!spec.contains("g")) throw ConfigError("monomial kernel: needs 'g'");
        return K::monomial(static_cast<int>(require_integer(spec, "q")),
                           build_time_function(spec.at("g"), extra_scale));
    }
    if (family == "time_window") {
        require_keys_subset(spec, {"family", "t0", "inner"}, "kernel");
        if (!spec.contains("inner")) throw ConfigError("time window kernel: needs 'inner'");
        return K::time_window(build_kernel(spec.at("inner"), extra_scale),
                              require_number(spec, "t0"));
    }
    if (family == "big_jump_window") {
        require_keys_subset(spec, {"family", "inner"}, "kernel");
        if (!spec.contains("inner"))
            throw ConfigError("big jump window kernel: needs 'inner'");
        return K::big_jump_window(build_kernel(spec.at("inner"), extra_scale));
    }
    if (family == "additive") {
        require_keys_subset(spec, {"family", "g", "coeff", "beta"}, "kernel");
        if (!spec.contains("g")) throw ConfigError("additive kernel: needs 'g'");
        return K::additive(build_time_function(spec.at("g"), extra_scale),
                           require_number(spec, "coeff") * extra_scale,
                           require_number(spec, "beta"));
    }
    throw ConfigError("unknown kernel family '" + family + "'");
}

stochastic::JumpLaw build_sigma(const json& spec) {
    expect_object(spec, "sigma");
    const std::string family = require_string(spec, "family");
    using JL = stochastic::JumpLaw;
    try {
        if (family == "exponential") {
            require_keys_subset(spec, {"family", "rate"}, "sigma");
            return JL::exponential(require_number(spec, "rate"));
        }
        if (family == "uniform") {
            require_keys_subset(spec, {"family", "lo", "hi"}, "sigma");
            return JL::uniform(require_number(spec, "lo"), require_number(spec, "hi"));
        }
        if (family == "symmetric_uniform") {
            require_keys_subset(spec, {"family", "inner", "outer"}, "sigma");
            return JL::symmetric_uniform(require_number(spec, "inner"),
                                         require_number(spec, "outer"));
        }
        if (family == "shifted_exponential") {
            require_keys_subset(spec, {"family", "rate"}, "sigma");
            return JL::shifted_exponential(require_number(spec, "rate"));
        }
        if (family == "discrete") {
            require_keys_subset(spec, {"family", "locations", "weights"}, "sigma");
            const auto locs = spec.at("locations").get<std::vector<double>>();
            const auto wts = spec.at("weights").get<std::vector<double>>();
            if (locs.size() != wts.size())
                throw ConfigError("discrete sigma: locations/weights length mismatch");
            std::vector<std::pair<double, double>> atoms;
            for (std::size_t i = 0; i < locs.size(); ++i)
                atoms.emplace_back(locs[i], wts[i]);
            return JL::discrete(std::move(atoms));
        }
        if (family == "normal_nonzero") {
            require_keys_subset(spec, {"family", "mean", "stddev"}, "sigma");
            return JL::normal_nonzero(require_number(spec, "mean"),
                                      require_number(spec, "stddev"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sigma: ") + e.what());
    }
    throw ConfigError("unknown sigma family '" + family + "'");
}

sde::DriftSpec build_drift(const json& spec, double slope_scale) {
    expect_object(spec, "drift");
    const std::string family = require_string(spec, "family");
    using D = sde::DriftSpec;
    if (family == "zero") {
        require_keys_subset(spec, {"family"}, "drift");
        return D::zero();
    }
    if (family == "constant") {
        require_keys_subset(spec, {"family", "c"}, "drift");
        return D::constant(require_number(spec, "c"));
    }
    if (family == "affine") {
        require_keys_subset(spec, {"family", "c0", "c1"}, "drift");
        return D::affine(require_number(spec, "c0"),
                         require_number(spec, "c1") * slope_scale);
    }
    if (family == "damped_cubic") {
        require_keys_subset(spec, {"family", "lambda"}, "drift");
        return D::damped_cubic(require_number(spec, "lambda") * slope_scale);
    }
    if (family == "logistic") {
        require_keys_subset(spec, {"family", "scale", "steepness", "midpoint"}, "drift");
        return D::logistic(require_number(spec, "scale") * slope_scale,
                           require_number(spec, "steepness"),
                           require_number(spec, "midpoint"));
    }
    throw ConfigError("unknown drift family '" + family + "'");
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo, hi;
    long count;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || !ss.eof())
        throw ConfigError("grid spec must be 'lo:hi:count', got '" + spec + "'");
    if (count < 2 || !(hi > lo))
        throw ConfigError("grid spec needs hi > lo and count >= 2");
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return grid;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    RunConfig cfg;
    try {
        cfg.doc_ = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_object(cfg.doc_, "config");
    require_keys_subset(cfg.doc_,
                        {"schema_version", "seed", "threads", "rate", "kernel", "sigma",
                         "truncation", "simulate", "charfn", "density", "tv", "check",
                         "converge", "sde", "condlaw"},
                        "config");
    if (require_integer(cfg.doc_, "schema_version") != 1)
        throw ConfigError("unsupported schema_version (expected 1)");
    if (!cfg.doc_.contains("seed"))
        throw ConfigError("config requires an explicit 'seed'");
    cfg.seed_ = cfg.doc_.at("seed").get<std::uint64_t>();
    if (cfg.doc_.contains("threads")) {
        cfg.threads_ = static_cast<int>(require_integer(cfg.doc_, "threads"));
        if (cfg.threads_ < 1) throw ConfigError("threads must be >= 1");
    }
    if (cfg.doc_.contains("rate")) {
        cfg.rate_ = require_number(cfg.doc_, "rate");
        if (!(cfg.rate_ > 0.0)) throw ConfigError("rate must be > 0");
    }
    return cfg;
}

kernels::Kernel RunConfig::kernel() const {
    if (!doc_.contains("kernel")) throw ConfigError("config has no 'kernel' section");
    return build_kernel(doc_.at("kernel"));
}

stochastic::JumpLaw RunConfig::sigma() const {
    if (!doc_.contains("sigma")) throw ConfigError("config has no 'sigma' section");
    return build_sigma(doc_.at("sigma"));
}

series::Truncation RunConfig::truncation() const {
    series::Truncation tr;
    if (!doc_.contains("truncation")) return tr;
    const json& t = expect_object(doc_.at("truncation"), "truncation");
    require_keys_subset(t, {"t_max", "epsilon"}, "truncation");
    if (t.contains("t_max")) tr.t_max = require_number(t, "t_max");
    if (t.contains("epsilon")) {
        tr.epsilon = require_number(t, "epsilon");
        if (!(tr.epsilon > 0.0)) throw ConfigError("truncation.epsilon must be > 0");
    }
    return tr;
}

const json& RunConfig::section(const std::string& name) const {
    if (!doc_.contains(name))
        throw ConfigError("config has no '" + name + "' section");
    return expect_object(doc_.at(name), name);
}

} // namespace shotnoise::config
