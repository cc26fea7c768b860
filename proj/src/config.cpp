#include "edgelab/config.hpp"

#include "edgelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace edgelab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
        throw ConfigError(path, "expected a non-negative integer");
    const double v = j.get<double>();
    if (v < 0) throw ConfigError(path, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

template <class F>
auto optional_field(const json& j, const std::string& key, const std::string& path, F&& conv)
    -> std::optional<decltype(conv(j, path))> {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return conv(*it, join(path, key));
}

template <class F>
auto list_of(const json& j, const std::string& path, F&& conv) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    std::vector<decltype(conv(j, path))> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(conv(j[i], index(path, i)));
    return out;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return it.key() == k; }))
            throw ConfigError(join(path, it.key()), "unknown field");
    }
}

DistSpec innovation_from_json(const json& j, const std::string& path) {
    const std::string type = as_string(require(j, "type", path), join(path, "type"));
    auto num = [&](const char* k, double def) {
        return optional_field(j, k, path, as_number).value_or(def);
    };
    DistSpec d;
    if (type == "normal") {
        check_keys(j, path, {"type"});
        d = StandardNormal{};
    } else if (type == "uniform") {
        check_keys(j, path, {"type", "a", "b"});
        d = Uniform{num("a", -1.0), num("b", 1.0)};
    } else if (type == "centered_exponential") {
        check_keys(j, path, {"type", "rate"});
        d = CenteredExponential{num("rate", 1.0)};
    } else if (type == "two_point") {
        check_keys(j, path, {"type", "p", "x_lo", "x_hi"});
        d = TwoPoint{num("p", 0.5), num("x_lo", -1.0), num("x_hi", 1.0)};
    } else if (type == "three_point") {
        check_keys(j, path, {"type", "p1", "p2", "x1", "x2", "x3"});
        d = ThreePoint{as_number(require(j, "p1", path), join(path, "p1")),
                       as_number(require(j, "p2", path), join(path, "p2")),
                       as_number(require(j, "x1", path), join(path, "x1")),
                       as_number(require(j, "x2", path), join(path, "x2")),
                       as_number(require(j, "x3", path), join(path, "x3"))};
    } else if (type == "gamma") {
        check_keys(j, path, {"type", "shape", "rate"});
        d = GammaDist{num("shape", 1.0), num("rate", 1.0)};
    } else {
        throw ConfigError(join(path, "type"), "unknown innovation law '" + type + "'");
    }
    try {
        d.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(path, e.what());
    }
    return d;
}

Kernel kernel_from_json(const json& j, const std::string& path) {
    const std::string type = as_string(require(j, "type", path), join(path, "type"));
    if (type == "geometric") {
        check_keys(j, path, {"type", "r"});
        return GeometricKernel{as_number(require(j, "r", path), join(path, "r"))};
    }
    if (type == "polynomial") {
        check_keys(j, path, {"type", "theta"});
        return PolynomialKernel{as_number(require(j, "theta", path), join(path, "theta"))};
    }
    if (type == "explicit") {
        check_keys(j, path, {"type", "values"});
        return ExplicitKernel{list_of(require(j, "values", path), join(path, "values"), as_number)};
    }
    throw ConfigError(join(path, "type"), "unknown kernel '" + type + "'");
}

HolderMeta holder_from_json(const json& j, const std::string& path) {
    check_keys(j, path, {"L", "alpha", "beta"});
    HolderMeta h;
    h.L = optional_field(j, "L", path, as_number).value_or(h.L);
    h.alpha = optional_field(j, "alpha", path, as_number).value_or(h.alpha);
    h.beta = optional_field(j, "beta", path, as_number).value_or(h.beta);
    return h;
}

FamilyVariant family_from_json(const json& j, const std::string& path) {
    const std::string type = as_string(require(j, "type", path), join(path, "type"));
    auto burn = optional_field(j, "burn_in", path, as_count);
    if (type == "garch") {
        check_keys(j, path, {"type", "lambda", "g", "c", "burn_in"});
        GarchSpec s;
        s.lambda = optional_field(j, "lambda", path, as_number).value_or(1.0);
        s.g = list_of(require(j, "g", path), join(path, "g"), [](const json& e, const std::string& p) {
            check_keys(e, p, {"w", "u"});
            return GarchIntercept{optional_field(e, "w", p, as_number).value_or(0.0),
                                  optional_field(e, "u", p, as_number).value_or(0.0)};
        });
        s.c = list_of(require(j, "c", path), join(path, "c"), [](const json& e, const std::string& p) {
            check_keys(e, p, {"b", "a"});
            return GarchCoefficient{optional_field(e, "b", p, as_number).value_or(0.0),
                                    optional_field(e, "a", p, as_number).value_or(0.0)};
        });
        s.burn_in = burn;
        return s;
    }
    if (type == "iterated") {
        check_keys(j, path, {"type", "a", "b", "c", "d", "v_min", "v_max", "v0", "burn_in"});
        IteratedSpec s;
        s.a = optional_field(j, "a", path, as_number).value_or(s.a);
        s.b = optional_field(j, "b", path, as_number).value_or(s.b);
        s.c = optional_field(j, "c", path, as_number).value_or(s.c);
        s.d = optional_field(j, "d", path, as_number).value_or(s.d);
        s.v_min = optional_field(j, "v_min", path, as_number);
        s.v_max = optional_field(j, "v_max", path, as_number);
        s.v0 = optional_field(j, "v0", path, as_number).value_or(s.v0);
        s.burn_in = burn;
        return s;
    }
    if (type == "linear") {
        check_keys(j, path, {"type", "kernel", "inner", "outer", "m_max", "burn_in"});
        LinearSpec s;
        s.kernel = kernel_from_json(require(j, "kernel", path), join(path, "kernel"));
        if (auto inner = optional_field(j, "inner", path, as_string)) {
            if (*inner == "identity") s.inner = InnerMap::identity;
            else if (*inner == "square") s.inner = InnerMap::square;
            else if (*inner == "abs") s.inner = InnerMap::abs;
            else throw ConfigError(join(path, "inner"), "expected identity, square or abs");
        }
        if (j.contains("outer")) {
            const std::string op = join(path, "outer");
            const json& o = j["outer"];
            check_keys(o, op, {"kind", "r", "holder"});
            const std::string kind = as_string(require(o, "kind", op), join(op, "kind"));
            if (kind == "identity") s.outer.kind = OuterMapKind::identity;
            else if (kind == "abs") s.outer.kind = OuterMapKind::abs;
            else if (kind == "power") s.outer.kind = OuterMapKind::power;
            else throw ConfigError(join(op, "kind"), "expected identity, abs or power");
            s.outer.r = optional_field(o, "r", op, as_number).value_or(1.0);
            if (o.contains("holder")) s.outer.holder = holder_from_json(o["holder"], join(op, "holder"));
        }
        s.m_max = optional_field(j, "m_max", path, as_count).value_or(s.m_max);
        s.burn_in = burn;
        return s;
    }
    if (type == "volterra") {
        check_keys(j, path, {"type", "order", "kappa", "m_max", "burn_in"});
        VolterraSpec s;
        s.order = optional_field(j, "order", path, as_count).value_or(s.order);
        s.kappa = kernel_from_json(require(j, "kappa", path), join(path, "kappa"));
        s.m_max = optional_field(j, "m_max", path, as_count).value_or(s.m_max);
        s.burn_in = burn;
        return s;
    }
    throw ConfigError(join(path, "type"), "unknown family '" + type + "'");
}

TransformSpec transform_from_json(const json& j, const std::string& path) {
    check_keys(j, path, {"type", "order", "r", "signed", "coefficients", "holder", "centering"});
    const std::string type = as_string(require(j, "type", path), join(path, "type"));
    TransformSpec t;
    if (type == "identity") {
        t.variant = IdentityTransform{};
    } else if (type == "compensator") {
        const auto order = optional_field(j, "order", path, as_count).value_or(2);
        if (order != 2 && order != 3) throw ConfigError(join(path, "order"), "must be 2 or 3");
        t.variant = CompensatorTransform{static_cast<int>(order)};
    } else if (type == "power") {
        t.variant = PowerTransform{as_number(require(j, "r", path), join(path, "r")),
                                   optional_field(j, "signed", path, as_bool).value_or(false)};
    } else if (type == "polynomial") {
        t.variant = PolynomialTransform{
            list_of(require(j, "coefficients", path), join(path, "coefficients"), as_number)};
    } else {
        throw ConfigError(join(path, "type"), "unknown transform '" + type + "'");
    }
    if (j.contains("holder")) t.holder = holder_from_json(j["holder"], join(path, "holder"));
    t.centering = optional_field(j, "centering", path, as_number);
    return t;
}

std::vector<EdgeworthMode> modes_from_json(const json& j, const std::string& path) {
    auto one = [](const json& e, const std::string& p) {
        const auto s = as_string(e, p);
        if (s == "classical") return EdgeworthMode::classical;
        if (s == "literal") return EdgeworthMode::literal;
        throw ConfigError(p, "expected classical or literal");
    };
    if (j.is_string()) return {one(j, path)};
    auto out = list_of(j, path, one);
    if (out.empty()) throw ConfigError(path, "at least one mode is required");
    return out;
}

Task task_from_string(const std::string& s, const std::string& path) {
    for (Task t : {Task::cumulants, Task::edgeworth, Task::wasserstein, Task::dependence,
                   Task::assumptions, Task::cf_scan, Task::be_characteristic, Task::price})
        if (to_string(t) == s) return t;
    throw ConfigError(path, "unknown task '" + s + "'");
}

const json& task_block(const json& j, Task t) {
    return require(j, to_string(t), "");
}

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::cumulants: return "cumulants";
        case Task::edgeworth: return "edgeworth";
        case Task::wasserstein: return "wasserstein";
        case Task::dependence: return "dependence";
        case Task::assumptions: return "assumptions";
        case Task::cf_scan: return "cf-scan";
        case Task::be_characteristic: return "be-characteristic";
        case Task::price: return "price";
    }
    return "unknown";
}

bool ExperimentConfig::has(Task t) const {
    return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

ModelConfig model_from_json(const json& j, const std::string& path) {
    check_keys(j, path, {"family", "innovation", "transform"});
    ModelConfig cfg;
    cfg.family = family_from_json(require(j, "family", path), join(path, "family"));
    cfg.innovation = innovation_from_json(require(j, "innovation", path), join(path, "innovation"));
    if (j.contains("transform"))
        cfg.transform = transform_from_json(j["transform"], join(path, "transform"));
    try {
        validate(cfg);
    } catch (const ParameterError& e) {
        throw ConfigError(path, e.what());
    }
    return cfg;
}

ExperimentConfig experiment_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("(root)", "expected a JSON object");
    check_keys(j, "", {"version", "seed", "N", "n_list", "workers", "tasks", "output", "warn_only",
                       "centering_N", "model", "cumulants", "edgeworth", "wasserstein",
                       "dependence", "assumptions", "cf-scan", "be-characteristic", "price"});
    ExperimentConfig e;
    if (auto v = optional_field(j, "version", "", as_string); v && *v != kLibraryVersion)
        throw ConfigError("version", "unsupported schema version '" + *v + "'");
    e.model = model_from_json(require(j, "model", ""), "model");
    e.n_list = list_of(require(j, "n_list", ""), "n_list", as_count);
    if (e.n_list.empty()) throw ConfigError("n_list", "must not be empty");
    for (std::size_t i = 0; i < e.n_list.size(); ++i)
        if (e.n_list[i] < 1) throw ConfigError(index("n_list", i), "must be >= 1");
    e.N = as_count(require(j, "N", ""), "N");
    if (e.N < 100) throw ConfigError("N", "must be >= 100");
    const json& seed = require(j, "seed", "");
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0))
        throw ConfigError("seed", "expected a non-negative 64-bit integer");
    e.seed = seed.get<std::uint64_t>();
    e.workers = optional_field(j, "workers", "", as_count).value_or(0);
    e.warn_only = optional_field(j, "warn_only", "", as_bool).value_or(false);
    e.centering_N = optional_field(j, "centering_N", "", as_count).value_or(e.centering_N);
    if (e.centering_N < 1000) throw ConfigError("centering_N", "must be >= 1000");

    e.tasks = list_of(require(j, "tasks", ""), "tasks", [](const json& t, const std::string& p) {
        return task_from_string(as_string(t, p), p);
    });
    if (e.tasks.empty()) throw ConfigError("tasks", "at least one task is required");

    if (j.contains("output")) {
        const json& o = j["output"];
        check_keys(o, "output", {"dir", "csv", "json", "pricing_csv"});
        e.out_dir = optional_field(o, "dir", "output", as_string).value_or(e.out_dir);
        e.csv_name = optional_field(o, "csv", "output", as_string).value_or(e.csv_name);
        e.json_name = optional_field(o, "json", "output", as_string).value_or(e.json_name);
        e.pricing_csv_name =
            optional_field(o, "pricing_csv", "output", as_string).value_or(e.pricing_csv_name);
    }

    for (Task t : e.tasks) {
        const std::string p = to_string(t);
        const json& b = task_block(j, t);
        if (!b.is_object()) throw ConfigError(p, "expected an object");
        switch (t) {
            case Task::cumulants:
                check_keys(b, p, {"lrv_length"});
                e.cumulants.lrv_length =
                    optional_field(b, "lrv_length", p, as_count).value_or(e.cumulants.lrv_length);
                break;
            case Task::edgeworth:
                check_keys(b, p, {"modes", "refine"});
                if (b.contains("modes")) e.edgeworth.modes = modes_from_json(b["modes"], p + ".modes");
                e.edgeworth.refine = optional_field(b, "refine", p, as_count).value_or(e.edgeworth.refine);
                break;
            case Task::wasserstein:
                check_keys(b, p, {"batches"});
                e.wasserstein.batches =
                    optional_field(b, "batches", p, as_count).value_or(e.wasserstein.batches);
                if (e.wasserstein.batches < 2) throw ConfigError(p + ".batches", "must be >= 2");
                break;
            case Task::dependence: {
                check_keys(b, p, {"p", "lags", "N"});
                e.dependence.p = optional_field(b, "p", p, as_number).value_or(2.0);
                if (!(e.dependence.p >= 1.0)) throw ConfigError(p + ".p", "must be >= 1");
                e.dependence.lags = list_of(require(b, "lags", p), p + ".lags", as_count);
                if (e.dependence.lags.empty()) throw ConfigError(p + ".lags", "must not be empty");
                for (std::size_t i = 0; i < e.dependence.lags.size(); ++i)
                    if (e.dependence.lags[i] < 1)
                        throw ConfigError(index(p + ".lags", i), "must be >= 1");
                e.dependence.N = optional_field(b, "N", p, as_count).value_or(e.dependence.N);
                if (e.dependence.N < 1000) throw ConfigError(p + ".N", "must be >= 1000");
                break;
            }
            case Task::assumptions:
                check_keys(b, p, {"delta", "xi", "N_outer", "N_inner"});
                e.assumptions.delta = optional_field(b, "delta", p, as_number).value_or(e.assumptions.delta);
                if (b.contains("xi")) e.assumptions.xi = list_of(b["xi"], p + ".xi", as_number);
                e.assumptions.N_outer =
                    optional_field(b, "N_outer", p, as_count).value_or(e.assumptions.N_outer);
                e.assumptions.N_inner =
                    optional_field(b, "N_inner", p, as_count).value_or(e.assumptions.N_inner);
                break;
            case Task::cf_scan:
                check_keys(b, p, {"a", "b", "grid_size"});
                e.cf_scan.a = optional_field(b, "a", p, as_number).value_or(e.cf_scan.a);
                e.cf_scan.b = optional_field(b, "b", p, as_number).value_or(e.cf_scan.b);
                e.cf_scan.grid_size =
                    optional_field(b, "grid_size", p, as_count).value_or(e.cf_scan.grid_size);
                if (!(e.cf_scan.a > 0.0 && e.cf_scan.b > e.cf_scan.a))
                    throw ConfigError(p + ".b", "need 0 < a < b");
                if (e.cf_scan.grid_size < 64) throw ConfigError(p + ".grid_size", "must be >= 64");
                break;
            case Task::be_characteristic: {
                auto& be = e.be_characteristic;
                check_keys(b, p, {"a", "max_doublings", "x_points", "max_sample"});
                be.a = optional_field(b, "a", p, as_number).value_or(be.a);
                if (!(be.a > 0.0)) throw ConfigError(p + ".a", "must be > 0");
                be.max_doublings = optional_field(b, "max_doublings", p, as_count).value_or(be.max_doublings);
                if (be.max_doublings > 12) throw ConfigError(p + ".max_doublings", "must be <= 12");
                be.x_points = optional_field(b, "x_points", p, as_count).value_or(be.x_points);
                if (be.x_points < 3) throw ConfigError(p + ".x_points", "must be >= 3");
                be.max_sample = optional_field(b, "max_sample", p, as_count).value_or(be.max_sample);
                if (be.max_sample < 100) throw ConfigError(p + ".max_sample", "must be >= 100");
                break;
            }
            case Task::price: {
                check_keys(b, p, {"K", "N", "modes", "drift"});
                const json& k = require(b, "K", p);
                e.price.K = k.is_array() ? list_of(k, p + ".K", as_number)
                                         : std::vector<double>{as_number(k, p + ".K")};
                if (e.price.K.empty()) throw ConfigError(p + ".K", "must not be empty");
                for (std::size_t i = 0; i < e.price.K.size(); ++i)
                    if (!(e.price.K[i] > 0.0)) throw ConfigError(p + ".K", "strikes must be > 0");
                e.price.N = optional_field(b, "N", p, as_count).value_or(e.N);
                if (e.price.N < 10000) throw ConfigError(p + ".N", "must be >= 10000");
                if (b.contains("modes")) e.price.modes = modes_from_json(b["modes"], p + ".modes");
                e.price.drift = optional_field(b, "drift", p, as_number);
                break;
            }
        }
    }
    return e;
}

ExperimentConfig load_experiment(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("(file)", "cannot open '" + file + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("(file)", std::string("invalid JSON: ") + e.what());
    }
    return experiment_from_json(j);
}

namespace {

ordered_json kernel_to_json(const Kernel& k) {
    return std::visit(
        [](const auto& v) -> ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GeometricKernel>) return {{"type", "geometric"}, {"r", v.r}};
            else if constexpr (std::is_same_v<T, PolynomialKernel>)
                return {{"type", "polynomial"}, {"theta", v.theta}};
            else return {{"type", "explicit"}, {"values", v.values}};
        },
        k);
}

ordered_json holder_to_json(const HolderMeta& h) {
    return {{"L", h.L}, {"alpha", h.alpha}, {"beta", h.beta}};
}

}  // namespace

ordered_json model_to_json(const ModelConfig& cfg) {
    ordered_json fam = std::visit(
        [](const auto& f) -> ordered_json {
            using T = std::decay_t<decltype(f)>;
            ordered_json o;
            if constexpr (std::is_same_v<T, GarchSpec>) {
                o["type"] = "garch";
                o["lambda"] = f.lambda;
                o["g"] = ordered_json::array();
                for (const auto& g : f.g) o["g"].push_back({{"w", g.w}, {"u", g.u}});
                o["c"] = ordered_json::array();
                for (const auto& c : f.c) o["c"].push_back({{"b", c.b}, {"a", c.a}});
            } else if constexpr (std::is_same_v<T, IteratedSpec>) {
                o = {{"type", "iterated"}, {"a", f.a}, {"b", f.b}, {"c", f.c}, {"d", f.d}, {"v0", f.v0}};
                if (f.v_min) o["v_min"] = *f.v_min;
                if (f.v_max) o["v_max"] = *f.v_max;
            } else if constexpr (std::is_same_v<T, LinearSpec>) {
                static const char* inner[] = {"identity", "square", "abs"};
                static const char* outer[] = {"identity", "abs", "power"};
                o = {{"type", "linear"},
                     {"kernel", kernel_to_json(f.kernel)},
                     {"inner", inner[static_cast<int>(f.inner)]},
                     {"outer",
                      {{"kind", outer[static_cast<int>(f.outer.kind)]},
                       {"r", f.outer.r},
                       {"holder", holder_to_json(f.outer.holder)}}},
                     {"m_max", f.m_max}};
            } else {
                o = {{"type", "volterra"},
                     {"order", f.order},
                     {"kappa", kernel_to_json(f.kappa)},
                     {"m_max", f.m_max}};
            }
            if (f.burn_in) o["burn_in"] = *f.burn_in;
            return o;
        },
        cfg.family);

    ordered_json inn = std::visit(
        [](const auto& d) -> ordered_json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StandardNormal>) return {{"type", "normal"}};
            else if constexpr (std::is_same_v<T, Uniform>) return {{"type", "uniform"}, {"a", d.a}, {"b", d.b}};
            else if constexpr (std::is_same_v<T, CenteredExponential>)
                return {{"type", "centered_exponential"}, {"rate", d.rate}};
            else if constexpr (std::is_same_v<T, TwoPoint>)
                return {{"type", "two_point"}, {"p", d.p}, {"x_lo", d.x_lo}, {"x_hi", d.x_hi}};
            else if constexpr (std::is_same_v<T, ThreePoint>)
                return {{"type", "three_point"}, {"p1", d.p1}, {"p2", d.p2},
                        {"x1", d.x1}, {"x2", d.x2}, {"x3", d.x3}};
            else return {{"type", "gamma"}, {"shape", d.shape}, {"rate", d.rate}};
        },
        cfg.innovation.variant());

    ordered_json tr = std::visit(
        [](const auto& t) -> ordered_json {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, IdentityTransform>) return {{"type", "identity"}};
            else if constexpr (std::is_same_v<T, CompensatorTransform>)
                return {{"type", "compensator"}, {"order", t.order}};
            else if constexpr (std::is_same_v<T, PowerTransform>)
                return {{"type", "power"}, {"r", t.r}, {"signed", t.signed_power}};
            else return {{"type", "polynomial"}, {"coefficients", t.coefficients}};
        },
        cfg.transform.variant);
    tr["holder"] = holder_to_json(cfg.transform.holder);
    if (cfg.transform.centering) tr["centering"] = *cfg.transform.centering;

    return {{"family", fam}, {"innovation", inn}, {"transform", tr}};
}

}  // namespace edgelab
