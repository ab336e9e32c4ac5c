#include "ellspec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ellspec/errors.hpp"

namespace ellspec::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_value(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double out = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': cannot parse '" + t + "' as a number");
  }
  return out;
}

std::int64_t parse_int_value(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + t + "' as an integer");
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  cfg.hash_ = fnv1a64(text);
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (cfg.values_.count(key) != 0) {
      throw ConfigError("config key '" + key + "' appears more than once");
    }
    cfg.values_[key] = value;
    cfg.consumed_[key] = false;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string KeyValueConfig::raw(const std::string& key) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing required config key '" + key + "'");
  }
  consumed_[key] = true;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) { return raw(key); }

std::string KeyValueConfig::get_string_or(const std::string& key,
                                          const std::string& fallback) {
  return has(key) ? raw(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) {
  return parse_double_value(key, raw(key));
}

double KeyValueConfig::get_double_or(const std::string& key, double fallback) {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) {
  return parse_int_value(key, raw(key));
}

std::int64_t KeyValueConfig::get_int_or(const std::string& key, std::int64_t fallback) {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueConfig::get_u64_or(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const std::int64_t v = get_int(key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool KeyValueConfig::get_bool_or(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) {
  std::vector<double> out;
  for (const std::string& part : split(raw(key), ',')) {
    out.push_back(parse_double_value(key, part));
  }
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key) {
  std::vector<int> out;
  for (const std::string& part : split(raw(key), ',')) {
    out.push_back(static_cast<int>(parse_int_value(key, part)));
  }
  return out;
}

void KeyValueConfig::ensure_all_consumed() const {
  std::string leftovers;
  for (const auto& [key, used] : consumed_) {
    if (!used) leftovers += (leftovers.empty() ? "" : ", ") + key;
  }
  if (!leftovers.empty()) {
    throw ConfigError("unknown config keys: " + leftovers);
  }
}

mesh::BoxDomain parse_domain(KeyValueConfig& cfg) {
  std::vector<double> lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};
  int dim = 3;
  if (cfg.has("domain.lo") || cfg.has("domain.hi")) {
    lo = cfg.get_doubles("domain.lo");
    hi = cfg.get_doubles("domain.hi");
    if (lo.size() != hi.size()) {
      throw ConfigError("domain.lo and domain.hi must have equal length");
    }
    dim = static_cast<int>(lo.size());
  }
  mesh::Point plo{}, phi{};
  for (int k = 0; k < dim && k < mesh::kMaxDim; ++k) {
    plo[k] = lo[static_cast<std::size_t>(k)];
    phi[k] = hi[static_cast<std::size_t>(k)];
  }
  try {
    return mesh::BoxDomain::make(dim, plo, phi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain.lo/domain.hi: ") + e.what());
  }
}

mesh::StructuredGrid parse_grid(KeyValueConfig& cfg, const mesh::BoxDomain& domain) {
  const std::vector<int> cells = cfg.get_ints("grid.cells");
  if (static_cast<int>(cells.size()) != domain.dim) {
    throw ConfigError("grid.cells must list one count per domain axis");
  }
  mesh::MultiIndex c{1, 1, 1};
  for (int k = 0; k < domain.dim; ++k) c[k] = cells[static_cast<std::size_t>(k)];
  try {
    return mesh::build_grid(domain, c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid.cells: ") + e.what());
  }
}

coeff::DiagonalTensorField parse_field(KeyValueConfig& cfg,
                                       const mesh::BoxDomain& domain) {
  using Field = coeff::DiagonalTensorField;
  try {
    if (cfg.has("field.preset")) {
      const std::string name = cfg.get_string("field.preset");
      if (domain.dim != 3 || domain.lo != mesh::Point{0.0, 0.0, 0.0} ||
          domain.hi != mesh::Point{1.0, 1.0, 1.0}) {
        throw ConfigError("field.preset requires the unit-cube domain");
      }
      return coeff::builtin_preset(name);
    }
    const std::string kind = cfg.get_string("field.kind");
    const int d = domain.dim;
    auto take_array = [&](const std::string& key) {
      const std::vector<double> v = cfg.get_doubles(key);
      if (static_cast<int>(v.size()) != d) {
        throw ConfigError("config key '" + key + "' must list one value per axis");
      }
      std::array<double, mesh::kMaxDim> out{};
      for (int k = 0; k < d; ++k) out[k] = v[static_cast<std::size_t>(k)];
      return out;
    };
    if (kind == "constant") {
      return Field(domain, Field::Constant{take_array("field.values")});
    }
    if (kind == "axis_affine") {
      Field::AxisAffine a;
      a.offsets = take_array("field.offsets");
      a.slopes = take_array("field.slopes");
      const std::vector<int> coords = cfg.get_ints("field.coords");
      if (static_cast<int>(coords.size()) != d) {
        throw ConfigError("field.coords must list one 1-based axis per component");
      }
      for (int k = 0; k < d; ++k) a.coords[k] = coords[static_cast<std::size_t>(k)] - 1;
      return Field(domain, a);
    }
    if (kind == "piecewise_constant") {
      Field::PiecewiseConstant p;
      p.background = take_array("field.background");
      // boxes: semicolon-separated groups "lo1,..,lod,hi1,..,hid,v1,..,vd"
      const std::string spec = cfg.get_string("field.boxes");
      std::stringstream ss(spec);
      std::string group;
      while (std::getline(ss, group, ';')) {
        std::vector<double> nums;
        std::stringstream gs(group);
        std::string tok;
        while (std::getline(gs, tok, ',')) {
          nums.push_back(parse_double_value("field.boxes", tok));
        }
        if (static_cast<int>(nums.size()) != 3 * d) {
          throw ConfigError("field.boxes: each group needs 3*dim numbers (lo, hi, values)");
        }
        Field::Box b;
        for (int k = 0; k < d; ++k) {
          b.lo[k] = nums[static_cast<std::size_t>(k)];
          b.hi[k] = nums[static_cast<std::size_t>(d + k)];
          b.values[k] = nums[static_cast<std::size_t>(2 * d + k)];
        }
        p.boxes.push_back(b);
      }
      if (p.boxes.empty()) throw ConfigError("field.boxes: no boxes given");
      return Field(domain, p);
    }
    if (kind == "smooth_radial") {
      Field::SmoothRadial s;
      s.base = cfg.get_double("field.base");
      s.amplitude = cfg.get_double("field.amplitude");
      s.width = cfg.get_double("field.width");
      const auto c = take_array("field.center");
      s.center = {c[0], c[1], c[2]};
      return Field(domain, s);
    }
    throw ConfigError("field.kind '" + kind +
                      "' unknown (constant, axis_affine, piecewise_constant, "
                      "smooth_radial)");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
}

analysis::SpectrumOptions parse_solver(KeyValueConfig& cfg,
                                       std::optional<std::uint64_t> seed_override) {
  analysis::SpectrumOptions opt;
  const std::string method = cfg.get_string_or("solver.method", "dense");
  if (method == "dense") {
    opt.method = analysis::SpectrumOptions::Method::dense;
  } else if (method == "lobpcg") {
    opt.method = analysis::SpectrumOptions::Method::lobpcg;
  } else {
    throw ConfigError("solver.method must be 'dense' or 'lobpcg'");
  }
  opt.want_vectors = cfg.get_bool_or("solver.want_vectors", false);
  opt.dense_cap = static_cast<std::size_t>(
      cfg.get_int_or("solver.dense_cap", static_cast<std::int64_t>(opt.dense_cap)));
  opt.block = static_cast<std::size_t>(
      cfg.get_int_or("solver.block", static_cast<std::int64_t>(opt.block)));
  const std::string which = cfg.get_string_or("solver.which", "smallest");
  if (which == "smallest") {
    opt.which = eig::Which::smallest;
  } else if (which == "largest") {
    opt.which = eig::Which::largest;
  } else {
    throw ConfigError("solver.which must be 'smallest' or 'largest'");
  }
  opt.tol = cfg.get_double_or("solver.tol", opt.tol);
  opt.max_iter = static_cast<int>(cfg.get_int_or("solver.max_iter", opt.max_iter));
  opt.seed = cfg.get_u64_or("solver.seed", opt.seed);
  if (seed_override.has_value()) opt.seed = *seed_override;
  opt.hull_oversample =
      static_cast<int>(cfg.get_int_or("hull.oversample", opt.hull_oversample));
  if (opt.hull_oversample < 1) throw ConfigError("hull.oversample must be >= 1");
  return opt;
}

}  // namespace ellspec::config
