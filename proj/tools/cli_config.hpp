#pragma once

#include "membrane/experiments.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace membrane::cli {

// One [study NAME] or [sweep NAME] section. A preset without an `object`
// key expands to both objects, so a run may hold several configs.
struct StudyRun {
  std::string name;
  std::vector<StudyConfig> configs;
};

struct SweepRun {
  std::string name;
  std::vector<SweepConfig> configs;
};

struct ConfigFile {
  std::vector<StudyRun> studies;
  std::vector<SweepRun> sweeps;
};

/// Flat key=value text with [study NAME] / [sweep NAME] sections and whole-line
/// '#' or ';' comments. `seed` and `cache_dir` fill configs that do not set
/// their own. Throws ParseError on malformed text and ConfigError on bad values.
ConfigFile parse_config(std::istream& in, std::uint64_t seed, const std::filesystem::path& cache_dir);
ConfigFile load_config(const std::filesystem::path& path, std::uint64_t seed,
                       const std::filesystem::path& cache_dir);

std::vector<double> parse_number_list(const std::string& field, const std::string& text);

nlohmann::json to_json(const StudyConfig& c);
nlohmann::json to_json(const SweepConfig& c);
nlohmann::json to_json(const TimingConfig& c);

}  // namespace membrane::cli
