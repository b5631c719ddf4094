#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ifslab/ifs.hpp"

namespace ifslab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Parsed and validated experiment configuration. `normalized` is the config
// with every default filled in and is what emit() returns, so
// load(emit(spec)) round-trips exactly.
struct SystemSpec {
    std::vector<Homeo> maps;
    std::vector<double> probs;
    std::vector<Observable> observables;
    std::uint64_t node_budget = kDefaultNodeBudget;
    std::size_t atom_cap = kDefaultAtomCap;
    std::uint64_t word_budget = std::uint64_t(1) << 20;
    nlohmann::json normalized;
    std::string config_hash;  // FNV-1a of the source bytes

    Ifs ifs() const { return Ifs::make(maps, probs); }
    const Observable& observable(std::size_t i = 0) const;
};

SystemSpec load_config(const std::filesystem::path& path);
SystemSpec parse_config(const std::string& text);
nlohmann::json emit(const SystemSpec& spec);

Homeo homeo_from_json(const nlohmann::json& j);
nlohmann::json homeo_to_json(const Homeo& h);
Observable observable_from_json(const nlohmann::json& j);
nlohmann::json observable_to_json(const Observable& f);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace ifslab
