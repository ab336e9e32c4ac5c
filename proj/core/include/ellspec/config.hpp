#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ellspec/analysis.hpp"
#include "ellspec/coefficients.hpp"
#include "ellspec/mesh.hpp"

namespace ellspec::config {

/// Flat `section.key = value` text: one pair per line, '#' comments, strict.
/// Every key must be consumed by the command reading it; leftovers are
/// rejected by name. Duplicate keys are rejected at parse time.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key);
  std::string get_string_or(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double_or(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key);
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback);
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback);
  bool get_bool_or(const std::string& key, bool fallback);
  std::vector<double> get_doubles(const std::string& key);  // comma-separated
  std::vector<int> get_ints(const std::string& key);

  /// Throws ConfigError naming every key that no getter consumed.
  void ensure_all_consumed() const;

  /// FNV-1a over the raw config text; logged with every run.
  std::uint64_t text_hash() const { return hash_; }

 private:
  std::string raw(const std::string& key);  // marks consumed

  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
  std::uint64_t hash_ = 0;
};

std::uint64_t fnv1a64(const std::string& text);

// Builders shared by the CLI subcommands. Each consumes its keys from the
// config and validates eagerly.

mesh::BoxDomain parse_domain(KeyValueConfig& cfg);
mesh::StructuredGrid parse_grid(KeyValueConfig& cfg, const mesh::BoxDomain& domain);
coeff::DiagonalTensorField parse_field(KeyValueConfig& cfg,
                                       const mesh::BoxDomain& domain);
analysis::SpectrumOptions parse_solver(KeyValueConfig& cfg,
                                       std::optional<std::uint64_t> seed_override);

}  // namespace ellspec::config
