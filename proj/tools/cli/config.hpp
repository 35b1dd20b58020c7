#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "torus_lab/cone.hpp"
#include "torus_lab/measure.hpp"
#include "torus_lab/random_system.hpp"
#include "torus_lab/torus_map.hpp"

namespace torus_lab::cli {

inline constexpr const char* kSchema = "torus-lab/1";

/// Parsed and validated run configuration. Command sections are kept as
/// JSON and read through Section, which names the failing field.
struct RunConfig {
  std::vector<TorusMap> maps;
  std::vector<double> weights;
  ConeSystem cones;
  SmoothReference reference;
  std::uint64_t seed = 1;
  int grid = 256;
  int quadrature = 256;
  std::vector<double> scales;
  nlohmann::json commands = nlohmann::json::object();

  GeneratorLaw law() const;
  /// The first two maps, or the first one twice (certify and periodic need a pair).
  std::pair<const TorusMap*, const TorusMap*> pair() const;
};

/// Throws ConfigInvalid naming the field for any violated precondition.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Typed reads from one command section, with defaults.
class Section {
 public:
  Section(const nlohmann::json& root, std::string name);

  bool has(const std::string& key) const;
  int get_int(const std::string& key, int fallback, int min_value, int max_value) const;
  double get_double(const std::string& key, double fallback, double min_value, double max_value) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<int> get_ints(const std::string& key, std::vector<int> fallback, int min_value, int max_value) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback, double min_value,
                                  double max_value) const;
  TorusPoint get_point(const std::string& key, TorusPoint fallback) const;
  /// Fails if the section holds keys the command does not read.
  void check_known(const std::vector<std::string>& keys) const;

  std::string field(const std::string& key) const { return name_ + "." + key; }

 private:
  const nlohmann::json* node(const std::string& key) const;

  nlohmann::json section_;
  std::string name_;
};

}  // namespace torus_lab::cli
