#ifndef AML_SERIALIZE_HPP
#define AML_SERIALIZE_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "aml/core.hpp"
#include "aml/sparse.hpp"

namespace aml {

using nlohmann::json;

/// { "constants": [labels], "atoms": [[sorted ids]...], "stats": [[g,birth]...] }
inline json model_to_json(const AtomizedModel& model) {
    json j;
    j["constants"] = model.universe()->names();
    json atoms = json::array();
    json stats = json::array();
    for (const auto& a : model.atoms()) {
        atoms.push_back(a.upper.indices());  // ascending by construction
        stats.push_back({a.growth, a.birth});
    }
    j["atoms"] = std::move(atoms);
    j["stats"] = std::move(stats);
    return j;
}

inline AtomizedModel model_from_json(const json& j) {
    auto universe = make_universe(j.at("constants").get<std::vector<std::string>>());
    AtomizedModel m(universe);
    const auto& atoms = j.at("atoms");
    const auto& stats = j.at("stats");
    if (atoms.size() != stats.size())
        throw std::runtime_error("model json: atoms/stats length mismatch");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        Bitset upper(universe->size());
        for (auto id : atoms[i].get<std::vector<std::uint32_t>>()) {
            if (id >= universe->size())
                throw std::runtime_error("model json: constant id out of range");
            upper.set(id);
        }
        m.add(Atom(std::move(upper), stats[i].at(0).get<std::uint32_t>(),
                   stats[i].at(1).get<std::uint64_t>()));
    }
    return m;
}

inline json config_to_json(const TrainConfig& c) {
    return json{{"gamma", c.simplification_threshold},
                {"kappa", c.dual_min_duple_fraction},
                {"delta", c.subset_fraction},
                {"batch_start", c.batch_start},
                {"batch_ramp", c.batch_ramp},
                {"batch_final_fraction", c.batch_final_fraction},
                {"full_batch", c.full_batch},
                {"max_batches", c.max_batches},
                {"stop_on_zero_training_error", c.stop_on_zero_training_error},
                {"rng_seed", c.rng_seed}};
}

inline TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.simplification_threshold = j.value("gamma", c.simplification_threshold);
    c.dual_min_duple_fraction = j.value("kappa", c.dual_min_duple_fraction);
    c.subset_fraction = j.value("delta", c.subset_fraction);
    c.batch_start = j.value("batch_start", c.batch_start);
    c.batch_ramp = j.value("batch_ramp", c.batch_ramp);
    c.batch_final_fraction = j.value("batch_final_fraction", c.batch_final_fraction);
    c.full_batch = j.value("full_batch", c.full_batch);
    c.max_batches = j.value("max_batches", c.max_batches);
    c.stop_on_zero_training_error =
        j.value("stop_on_zero_training_error", c.stop_on_zero_training_error);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    return c;
}

inline json checkpoint_to_json(const TrainState& state, const TrainConfig& config) {
    return json{{"master", model_to_json(state.master)},
                {"union", model_to_json(state.union_model)},
                {"config", config_to_json(config)},
                {"global_step", state.global_step},
                {"batch_index", state.batch_index}};
}

struct Checkpoint {
    TrainState state;
    TrainConfig config;
};

inline Checkpoint checkpoint_from_json(const json& j) {
    Checkpoint out;
    out.state.master = model_from_json(j.at("master"));
    out.state.union_model = model_from_json(j.at("union"));
    out.state.global_step = j.at("global_step").get<std::uint64_t>();
    out.state.batch_index = j.at("batch_index").get<std::size_t>();
    out.config = config_from_json(j.at("config"));
    return out;
}

inline void save_checkpoint(const std::string& path, const TrainState& state,
                            const TrainConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << checkpoint_to_json(state, config).dump(2) << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
        return checkpoint_from_json(j);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": corrupt checkpoint: " + e.what());
    }
}

} // namespace aml

#endif
