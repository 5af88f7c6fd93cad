#include "klab/harness/config.hpp"

#include "klab/errors.hpp"
#include "klab/surrogate.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace klab::harness {

using nlohmann::json;

namespace {

Ratio ratio_field(const json& j, const char* key, const Ratio& fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_string()) return Ratio::parse(v.get<std::string>());
    if (v.is_number_integer()) return Ratio(static_cast<long>(v.get<std::int64_t>()));
    throw ValidityError(std::string("config: '") + key + "' must be an integer or a \"p/q\" string");
}

template <class T>
void get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::string ratio_text(const Ratio& r) { return r.to_string(); }

} // namespace

void ExperimentConfig::validate() const {
    params.validate();
    if (workers < 1) throw ValidityError("config: workers must be positive");
    if (validity < 2) throw ValidityError("config: validity must be at least 2");
    for (const auto& f : families) surrogate_preset(f, validity);
    if (residues.q_max < 1 || residues.k_max < 2 || residues.grid < 1)
        throw ValidityError("config: residues needs q_max >= 1, k_max >= 2, grid >= 1");
    if (overlaps.q_max < 2 || overlaps.pairs < 1) throw ValidityError("config: overlaps needs q_max >= 2, pairs >= 1");
    if (bohr.b_max < 1 || bohr.j_max < 1 || bohr.beta_grid < 1 || bohr.a_per_b < 1 || bohr.once_around < 0)
        throw ValidityError("config: bohr ranges must be positive");
    if (blocks.a_min < 0 || blocks.a_max < blocks.a_min || blocks.max_log_ratio < 0 || blocks.points < 0)
        throw ValidityError("config: invalid block range");
    if (adhoc.a_min < 0 || adhoc.a_max < adhoc.a_min || adhoc.max_log_ratio < 0)
        throw ValidityError("config: invalid adhoc block range");
    if (qia.U < 1 || qia.U > 20) throw ValidityError("config: qia.U must lie in [1, 20]");
    if (model.log_M_min < 1 || model.log_M_max < model.log_M_min || model.log_M_max > 20 || model.trials < 1)
        throw ValidityError("config: invalid model grid");
    if (model.T < (std::int64_t{1} << model.log_M_max)) throw ValidityError("config: model.T must be at least M");
    for (auto q : convergence.Q0)
        if (q < 1) throw ValidityError("config: convergence.Q0 entries must be positive");
    if (convergence.tail_Q0 < 1) throw ValidityError("config: convergence.tail_Q0 must be positive");
}

int default_workers() {
    const char* env = std::getenv("LAB_WORKERS");
    if (!env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 1024) return 1;
    return static_cast<int>(v);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    c.workers = default_workers();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidityError(std::string("config: ") + e.what());
    }
    try {
        get(j, "seed", c.seed);
        get(j, "workers", c.workers);
        get(j, "validity", c.validity);
        get(j, "families", c.families);
        get(j, "out_dir", c.out_dir);
        if (j.contains("params")) {
            const json& p = j.at("params");
            c.params.sigma = ratio_field(p, "sigma", c.params.sigma);
            c.params.tau = ratio_field(p, "tau", c.params.tau);
            c.params.rho = ratio_field(p, "rho", c.params.rho);
            c.params.omega = ratio_field(p, "omega", c.params.omega);
            c.params.C1 = ratio_field(p, "C1", c.params.C1);
            c.params.C2 = ratio_field(p, "C2", c.params.C2);
        }
        if (j.contains("residues")) {
            const json& s = j.at("residues");
            get(s, "q_max", c.residues.q_max);
            get(s, "k_max", c.residues.k_max);
            get(s, "grid", c.residues.grid);
        }
        if (j.contains("overlaps")) {
            const json& s = j.at("overlaps");
            get(s, "q_max", c.overlaps.q_max);
            get(s, "pairs", c.overlaps.pairs);
        }
        if (j.contains("bohr")) {
            const json& s = j.at("bohr");
            get(s, "b_max", c.bohr.b_max);
            get(s, "j_max", c.bohr.j_max);
            get(s, "beta_grid", c.bohr.beta_grid);
            get(s, "a_per_b", c.bohr.a_per_b);
            get(s, "once_around", c.bohr.once_around);
        }
        if (j.contains("blocks")) {
            const json& s = j.at("blocks");
            get(s, "a_min", c.blocks.a_min);
            get(s, "a_max", c.blocks.a_max);
            get(s, "max_log_ratio", c.blocks.max_log_ratio);
            get(s, "points", c.blocks.points);
            get(s, "generators", c.blocks.generators);
        }
        if (j.contains("adhoc")) {
            const json& s = j.at("adhoc");
            get(s, "a_min", c.adhoc.a_min);
            get(s, "a_max", c.adhoc.a_max);
            get(s, "max_log_ratio", c.adhoc.max_log_ratio);
        }
        if (j.contains("qia")) {
            const json& s = j.at("qia");
            get(s, "U", c.qia.U);
            get(s, "families", c.qia.families);
        }
        if (j.contains("model")) {
            const json& s = j.at("model");
            get(s, "T", c.model.T);
            get(s, "log_M_min", c.model.log_M_min);
            get(s, "log_M_max", c.model.log_M_max);
            get(s, "trials", c.model.trials);
            get(s, "variants", c.model.variants);
            get(s, "families", c.model.families);
            get(s, "support", c.model.support);
            get(s, "contrast_family", c.model.contrast_family);
        }
        if (j.contains("convergence")) {
            const json& s = j.at("convergence");
            get(s, "Q0", c.convergence.Q0);
            get(s, "tail_Q0", c.convergence.tail_Q0);
        }
    } catch (const json::exception& e) {
        throw ValidityError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidityError("cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["validity"] = c.validity;
    j["families"] = c.families;
    j["out_dir"] = c.out_dir;
    j["params"] = {{"sigma", ratio_text(c.params.sigma)}, {"tau", ratio_text(c.params.tau)},
                   {"rho", ratio_text(c.params.rho)},     {"omega", ratio_text(c.params.omega)},
                   {"C1", ratio_text(c.params.C1)},       {"C2", ratio_text(c.params.C2)}};
    j["residues"] = {{"q_max", c.residues.q_max}, {"k_max", c.residues.k_max}, {"grid", c.residues.grid}};
    j["overlaps"] = {{"q_max", c.overlaps.q_max}, {"pairs", c.overlaps.pairs}};
    j["bohr"] = {{"b_max", c.bohr.b_max},         {"j_max", c.bohr.j_max},
                 {"beta_grid", c.bohr.beta_grid}, {"a_per_b", c.bohr.a_per_b},
                 {"once_around", c.bohr.once_around}};
    j["blocks"] = {{"a_min", c.blocks.a_min},
                   {"a_max", c.blocks.a_max},
                   {"max_log_ratio", c.blocks.max_log_ratio},
                   {"points", c.blocks.points},
                   {"generators", c.blocks.generators}};
    j["adhoc"] = {{"a_min", c.adhoc.a_min}, {"a_max", c.adhoc.a_max}, {"max_log_ratio", c.adhoc.max_log_ratio}};
    j["qia"] = {{"U", c.qia.U}, {"families", c.qia.families}};
    j["model"] = {{"T", c.model.T},
                  {"log_M_min", c.model.log_M_min},
                  {"log_M_max", c.model.log_M_max},
                  {"trials", c.model.trials},
                  {"variants", c.model.variants},
                  {"families", c.model.families},
                  {"support", c.model.support},
                  {"contrast_family", c.model.contrast_family}};
    j["convergence"] = {{"Q0", c.convergence.Q0}, {"tail_Q0", c.convergence.tail_Q0}};
    return j.dump(2) + "\n";
}

} // namespace klab::harness
