#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>

#include "nldiff/io.hpp"

namespace nldiff {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

namespace {

double to_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a number");
  const std::string text = node.Scalar();
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return value;
}

long long to_integer(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected an integer");
  const std::string text = node.Scalar();
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return value;
}

std::string to_text(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a string");
  return node.Scalar();
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const YAML::Node&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool dynamics = true;
};

template <typename Member>
Key real_key(std::string name, Member member, bool dynamics = true) {
  return Key{name,
             [member, name](RunConfig& c, const YAML::Node& n) { member(c) = to_double(n, name); },
             [member](const RunConfig& c) { return format_double(member(const_cast<RunConfig&>(c))); },
             dynamics};
}

template <typename Member>
Key int_key(std::string name, Member member, bool dynamics = true) {
  return Key{name,
             [member, name](RunConfig& c, const YAML::Node& n) {
               const long long v = to_integer(n, name);
               if (v < 0 || v > 1'000'000'000LL) throw ConfigError(name, "out of range");
               member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(v);
             },
             [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); },
             dynamics};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(real_key("alpha", [](RunConfig& c) -> double& { return c.solver.alpha; }));
    k.push_back(real_key("dt0", [](RunConfig& c) -> double& { return c.solver.dt0; }));
    k.push_back(real_key("dt_min", [](RunConfig& c) -> double& { return c.solver.dt_min; }));
    k.push_back(real_key("dt_max", [](RunConfig& c) -> double& { return c.solver.dt_max; }));
    k.push_back(real_key("t_end", [](RunConfig& c) -> double& { return c.solver.t_end; }, false));
    k.push_back(int_key("picard_max", [](RunConfig& c) -> int& { return c.solver.picard_max; }));
    k.push_back(real_key("picard_tol", [](RunConfig& c) -> double& { return c.solver.picard_tol; }));
    k.push_back(real_key("blowup_threshold", [](RunConfig& c) -> double& { return c.solver.blowup_threshold; }));
    k.push_back(int_key("snapshot_stride", [](RunConfig& c) -> int& { return c.solver.snapshot_stride; }, false));
    k.push_back(real_key("delta", [](RunConfig& c) -> double& { return c.solver.delta; }));
    k.push_back(real_key("r0", [](RunConfig& c) -> double& { return c.solver.r0; }));
    k.push_back(real_key("mono_tol", [](RunConfig& c) -> double& { return c.solver.mono_tol; }));
    k.push_back(real_key("tail_tol", [](RunConfig& c) -> double& { return c.solver.tail_tol; }));
    k.push_back(real_key("tail_fraction", [](RunConfig& c) -> double& { return c.solver.tail_fraction; }));
    k.push_back(real_key("floor_eps", [](RunConfig& c) -> double& { return c.solver.floor_eps; }));
    k.push_back(int_key("grow_after", [](RunConfig& c) -> int& { return c.solver.grow_after; }));
    k.push_back(Key{"tracked_q",
                    [](RunConfig& c, const YAML::Node& n) {
                      if (!n.IsSequence()) throw ConfigError("tracked_q", "expected a list of numbers");
                      c.solver.tracked_q.clear();
                      for (const auto& item : n) c.solver.tracked_q.push_back(to_double(item, "tracked_q"));
                    },
                    [](const RunConfig& c) {
                      std::string out = "[";
                      for (std::size_t i = 0; i < c.solver.tracked_q.size(); ++i) {
                        if (i) out += ", ";
                        out += format_double(c.solver.tracked_q[i]);
                      }
                      return out + "]";
                    },
                    true});
    k.push_back(Key{"domain",
                    [](RunConfig& c, const YAML::Node& n) {
                      try {
                        c.grid.kind = domain_kind_from_string(to_text(n, "domain"));
                      } catch (const std::invalid_argument& e) {
                        throw ConfigError("domain", e.what());
                      }
                    },
                    [](const RunConfig& c) { return to_string(c.grid.kind); }, true});
    k.push_back(int_key("n", [](RunConfig& c) -> std::size_t& { return c.grid.n; }));
    k.push_back(real_key("R", [](RunConfig& c) -> double& { return c.grid.radius; }));
    k.push_back(Key{"family",
                    [](RunConfig& c, const YAML::Node& n) {
                      try {
                        c.data.family = family_from_string(to_text(n, "family"));
                      } catch (const std::invalid_argument& e) {
                        throw ConfigError("family", e.what());
                      }
                    },
                    [](const RunConfig& c) { return to_string(c.data.family); }, true});
    k.push_back(real_key("amplitude", [](RunConfig& c) -> double& { return c.data.amplitude; }));
    k.push_back(real_key("width", [](RunConfig& c) -> double& { return c.data.width; }));
    k.push_back(real_key("height", [](RunConfig& c) -> double& { return c.data.height; }));
    k.push_back(real_key("plateau", [](RunConfig& c) -> double& { return c.data.plateau; }));
    k.push_back(real_key("cutoff", [](RunConfig& c) -> double& { return c.data.cutoff; }));
    k.push_back(real_key("power", [](RunConfig& c) -> double& { return c.data.power; }));
    k.push_back(real_key("core", [](RunConfig& c) -> double& { return c.data.core; }));
    k.push_back(real_key("support", [](RunConfig& c) -> double& { return c.data.support; }));
    return k;
  }();
  return table;
}

void validate(const RunConfig& c) {
  c.solver.validate();
  if (c.grid.n < RadialGrid::kMinNodes) throw ConfigError("n", "need at least 8 nodes");
  if (!(c.grid.radius > 0.0) || !std::isfinite(c.grid.radius)) throw ConfigError("R", "must be > 0");
  if (c.grid.kind == DomainKind::Ball && c.grid.radius != 1.0) throw ConfigError("R", "ball domain requires R = 1");
  const auto& d = c.data;
  if (!(d.amplitude > 0.0)) throw ConfigError("amplitude", "must be > 0");
  if (!(d.width > 0.0)) throw ConfigError("width", "must be > 0");
  if (!(d.height > 0.0)) throw ConfigError("height", "must be > 0");
  if (!(d.plateau >= 0.0)) throw ConfigError("plateau", "must be >= 0");
  if (!(d.cutoff > d.plateau)) throw ConfigError("cutoff", "must exceed plateau");
  if (!(d.power > 3.0)) throw ConfigError("power", "must be > 3");
  if (!(d.core > 0.0)) throw ConfigError("core", "must be > 0");
  if (!(d.support > 0.0)) throw ConfigError("support", "must be > 0");
  if (d.family == Family::PowerTail && c.grid.kind == DomainKind::Ball) {
    throw ConfigError("family", "power_tail is whole-space only");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("document", std::string("malformed document: ") + e.what());
  }
  RunConfig cfg;
  if (doc.IsNull()) {
    validate(cfg);
    return cfg;
  }
  if (!doc.IsMap()) throw ConfigError("document", "expected a mapping of settings");

  std::set<std::string> seen;
  for (const auto& item : doc) {
    const std::string name = item.first.as<std::string>();
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == name; });
    if (it == table.end()) throw ConfigError(name, "unknown key");
    it->set(cfg, item.second);
    seen.insert(name);
  }
  if (cfg.grid.kind == DomainKind::Ball) {
    if (!seen.count("R")) cfg.grid.radius = 1.0;
    if (!seen.count("family")) cfg.data.family = Family::Parabolic;
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("document", "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + ": " + k.get(cfg) + "\n";
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::string canon;
  for (const auto& k : keys()) {
    if (k.dynamics) canon += k.name + "=" + k.get(cfg) + ";";
  }
  return hex64(fnv1a64(canon));
}

}  // namespace nldiff
