#include "cbf/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "cbf/exceptions.hpp"
#include "cbf/initial_conditions.hpp"

namespace cbf {

namespace {

//======================================================================
// lexing
//======================================================================

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

struct Entry {
  std::string value;
  int line = 0;
};

// section -> key -> (value, line)
using Table = std::map<std::string, std::map<std::string, Entry>>;

Table lex(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::size_t cut = raw.find_first_of("#;");
    std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(line, "empty section name");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value, got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, "empty value for key '" + key + "'");
    if (section.empty()) fail(line, "key '" + key + "' outside any [section]");
    auto [it, fresh] = table[section].emplace(key, Entry{value, line});
    if (!fresh)
      fail(line, "duplicate key '" + key + "' in [" + section + "] (first at line " +
                     std::to_string(it->second.line) + ")");
  }
  return table;
}

//======================================================================
// typed extraction
//======================================================================

Real to_real(const Entry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  Real v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    fail(e.line, "key '" + key + "': expected a number, got '" + e.value + "'");
  return v;
}

long long to_int(const Entry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0')
    fail(e.line, "key '" + key + "': expected an integer, got '" + e.value + "'");
  return v;
}

std::uint64_t to_u64(const Entry& e, const std::string& key) {
  const char* s = e.value.c_str();
  if (*s == '-') fail(e.line, "key '" + key + "': expected a nonnegative integer");
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0')
    fail(e.line, "key '" + key + "': expected an integer, got '" + e.value + "'");
  return v;
}

// Pulls entries out of one section map and complains about leftovers.
class Section {
public:
  Section(Table& t, const std::string& name) : name_(name) {
    auto it = t.find(name);
    if (it != t.end()) entries_ = &it->second;
  }

  const Entry* get(const std::string& key) {
    if (!entries_) return nullptr;
    auto it = entries_->find(key);
    if (it == entries_->end()) return nullptr;
    taken_.insert(key);
    return &it->second;
  }

  void real(const std::string& key, Real& slot) {
    if (const Entry* e = get(key)) slot = to_real(*e, key);
  }
  void integer(const std::string& key, int& slot) {
    if (const Entry* e = get(key)) slot = (int)to_int(*e, key);
  }
  void u64(const std::string& key, std::uint64_t& slot) {
    if (const Entry* e = get(key)) slot = to_u64(*e, key);
  }

  void finish() const {
    if (!entries_) return;
    for (const auto& [key, entry] : *entries_)
      if (!taken_.count(key))
        fail(entry.line, "unknown key '" + key + "' in [" + name_ + "]");
  }

private:
  std::string name_;
  std::map<std::string, Entry>* entries_ = nullptr;
  std::set<std::string> taken_;
};

std::string fmt_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

const char* ic_kind_name(IcKind kind) {
  switch (kind) {
    case IcKind::taylor_green:    return "taylor_green";
    case IcKind::shear:           return "shear";
    case IcKind::beltrami:        return "beltrami";
    case IcKind::random_spectrum: return "random_spectrum";
  }
  throw ConfigError("unrecognized initial-condition kind");
}

RunConfig parse_config(const std::string& text) {
  Table table = lex(text);
  RunConfig cfg;

  Section model(table, "model");
  model.real("mu", cfg.params.mu);
  model.real("alpha", cfg.params.alpha);
  model.real("beta", cfg.params.beta);
  model.real("r", cfg.params.r);
  model.finish();

  Section res(table, "resolution");
  res.integer("K", cfg.K);
  res.integer("N", cfg.N);
  res.finish();

  Section time(table, "time");
  time.real("T", cfg.T);
  time.real("dt_init", cfg.control.dt_init);
  time.real("dt_min", cfg.control.dt_min);
  time.real("dt_max", cfg.control.dt_max);
  time.real("abs_tol", cfg.control.abs_tol);
  time.real("rel_tol", cfg.control.rel_tol);
  time.real("blowup_factor", cfg.control.blowup_factor);
  time.finish();

  Section ic(table, "ic");
  if (const Entry* e = ic.get("kind")) {
    const std::string& v = e->value;
    if (v == "taylor_green")         cfg.ic.kind = IcKind::taylor_green;
    else if (v == "shear")           cfg.ic.kind = IcKind::shear;
    else if (v == "beltrami")        cfg.ic.kind = IcKind::beltrami;
    else if (v == "random_spectrum") cfg.ic.kind = IcKind::random_spectrum;
    else
      fail(e->line, "key 'kind': unknown initial condition '" + v +
                        "' (taylor_green | shear | beltrami | random_spectrum)");
  }
  const Entry* seed_e = ic.get("seed");
  const Entry* slope_e = ic.get("slope");
  const Entry* amp_e = ic.get("amplitude");
  if (cfg.ic.kind != IcKind::random_spectrum) {
    const Entry* stray = seed_e ? seed_e : slope_e ? slope_e : amp_e;
    if (stray)
      fail(stray->line, "seed/slope/amplitude apply only to kind = random_spectrum");
  } else {
    if (seed_e) cfg.ic.seed = to_u64(*seed_e, "seed");
    if (slope_e) cfg.ic.slope = to_real(*slope_e, "slope");
    if (amp_e) cfg.ic.amplitude = to_real(*amp_e, "amplitude");
  }
  ic.finish();

  Section out(table, "output");
  out.integer("sample_cadence", cfg.sample_cadence);
  out.integer("checkpoint_cadence", cfg.checkpoint_cadence);
  out.finish();

  std::set<std::string> known = {"model", "resolution", "time", "ic", "output"};
  for (const auto& [section, entries] : table)
    if (!known.count(section))
      fail(entries.begin()->second.line, "unknown section [" + section + "]");

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[model]\n";
  os << "mu = " << fmt_real(cfg.params.mu) << "\n";
  os << "alpha = " << fmt_real(cfg.params.alpha) << "\n";
  os << "beta = " << fmt_real(cfg.params.beta) << "\n";
  os << "r = " << fmt_real(cfg.params.r) << "\n";
  os << "\n[resolution]\n";
  os << "K = " << cfg.K << "\n";
  os << "N = " << cfg.N << "\n";
  os << "\n[time]\n";
  os << "T = " << fmt_real(cfg.T) << "\n";
  os << "dt_init = " << fmt_real(cfg.control.dt_init) << "\n";
  os << "dt_min = " << fmt_real(cfg.control.dt_min) << "\n";
  os << "dt_max = " << fmt_real(cfg.control.dt_max) << "\n";
  os << "abs_tol = " << fmt_real(cfg.control.abs_tol) << "\n";
  os << "rel_tol = " << fmt_real(cfg.control.rel_tol) << "\n";
  os << "blowup_factor = " << fmt_real(cfg.control.blowup_factor) << "\n";
  os << "\n[ic]\n";
  os << "kind = " << ic_kind_name(cfg.ic.kind) << "\n";
  if (cfg.ic.kind == IcKind::random_spectrum) {
    os << "seed = " << cfg.ic.seed << "\n";
    os << "slope = " << fmt_real(cfg.ic.slope) << "\n";
    os << "amplitude = " << fmt_real(cfg.ic.amplitude) << "\n";
  }
  os << "\n[output]\n";
  os << "sample_cadence = " << cfg.sample_cadence << "\n";
  os << "checkpoint_cadence = " << cfg.checkpoint_cadence << "\n";
  return os.str();
}

void validate(const RunConfig& cfg) {
  validate(cfg.params);
  if (cfg.K < 1) throw ConfigError("K must be >= 1");
  int n_min = cfg.params.r <= 3 ? 2 * cfg.K + 2 : 2 * cfg.K + 1;
  if (cfg.N < n_min)
    throw ConfigError("N = " + std::to_string(cfg.N) + " under-resolves K = " +
                      std::to_string(cfg.K) + " (need N >= " +
                      std::to_string(n_min) + ")");
  if (!(cfg.T >= 0)) throw ConfigError("T must be >= 0");
  cfg.control.validate();
  if (!(cfg.control.abs_tol > 0)) throw ConfigError("abs_tol must be > 0");
  if (!(cfg.control.rel_tol > 0)) throw ConfigError("rel_tol must be > 0");
  if (cfg.sample_cadence < 1) throw ConfigError("sample_cadence must be >= 1");
  if (cfg.checkpoint_cadence < 0)
    throw ConfigError("checkpoint_cadence must be >= 0");
}

SpectralField initial_condition(const RunConfig& cfg) {
  switch (cfg.ic.kind) {
    case IcKind::taylor_green: return ic_taylor_green(cfg.K, cfg.N);
    case IcKind::shear:        return ic_shear(cfg.K, cfg.N);
    case IcKind::beltrami:     return ic_beltrami(cfg.K, cfg.N);
    case IcKind::random_spectrum:
      return ic_random_spectrum(cfg.K, cfg.ic.seed, cfg.ic.slope,
                                cfg.ic.amplitude, cfg.N);
  }
  throw ConfigError("unrecognized initial-condition kind");
}

} // namespace cbf
