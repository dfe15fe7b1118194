#include "gsqg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gsqg/errors.hpp"

namespace gsqg {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing "# comment".
std::string strip_comment(std::string_view s) {
  const auto h = s.find('#');
  return trim(h == std::string_view::npos ? s : s.substr(0, h));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto p = s.find(sep, start);
    const auto end = p == std::string_view::npos ? s.size() : p;
    out.push_back(trim(s.substr(start, end - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::vector<std::string> tokens(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || p != last || !std::isfinite(v)) throw ConfigError(what + ": not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto* last = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), last, v);
  if (ec != std::errc{} || p != last) throw ConfigError(what + ": not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, const std::string& what) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw ConfigError(what + ": not a boolean: '" + s + "'");
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

// key=value tokens into a map; every key must be in `allowed`.
std::map<std::string, std::string> keyed(std::string_view text, const std::set<std::string>& allowed,
                                         const std::string& what) {
  std::map<std::string, std::string> out;
  for (const std::string& t : tokens(text)) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(what + ": expected key=value, got '" + t + "'");
    const std::string k = t.substr(0, eq);
    if (!allowed.count(k)) throw ConfigError(what + ": unknown parameter '" + k + "'");
    out[k] = t.substr(eq + 1);
  }
  return out;
}

void apply_parameters(InitialCondition& ic, std::string_view text) {
  switch (ic.kind) {
    case InitialCondition::Kind::kModes:
      ic.modes = parse_modes(text);
      break;
    case InitialCondition::Kind::kBump: {
      const auto kv = keyed(text, {"r0", "k", "amplitude"}, "bump parameters");
      if (kv.count("r0")) ic.bump.r0 = to_double(kv.at("r0"), "bump r0");
      if (kv.count("k")) ic.bump.k = static_cast<int>(to_integer(kv.at("k"), "bump k"));
      if (kv.count("amplitude")) ic.bump.amplitude = to_double(kv.at("amplitude"), "bump amplitude");
      break;
    }
    case InitialCondition::Kind::kRough: {
      const auto kv = keyed(text, {"decay", "kmax", "amplitude", "seed"}, "rough parameters");
      if (kv.count("decay")) ic.rough.decay = to_double(kv.at("decay"), "rough decay");
      if (kv.count("kmax")) ic.rough.kmax = static_cast<int>(to_integer(kv.at("kmax"), "rough kmax"));
      if (kv.count("amplitude")) ic.rough.amplitude = to_double(kv.at("amplitude"), "rough amplitude");
      if (kv.count("seed")) ic.seed = static_cast<std::uint64_t>(to_integer(kv.at("seed"), "rough seed"));
      break;
    }
  }
}

InitialCondition::Kind parse_kind(const std::string& s) {
  if (s == "modes") return InitialCondition::Kind::kModes;
  if (s == "bump") return InitialCondition::Kind::kBump;
  if (s == "rough") return InitialCondition::Kind::kRough;
  throw ConfigError("initial kind must be one of modes, bump, rough; got '" + s + "'");
}

const std::map<std::string, std::set<std::string>> kKnown = {
    {"problem", {"alpha", "gamma", "cutoff"}},
    {"run", {"nu", "M", "dt", "T", "stride", "adaptive", "nonlinear", "exact_rate"}},
    {"sweep",
     {"nus", "T", "deltas", "lambdas", "Ns", "M_cap", "samples", "cfl", "dt_max", "threshold", "nonlinear",
      "resolution_check", "lattice_radius"}},
    {"initial", {"kind", "parameters", "seed"}},
    {"forcing", {"entries"}},
    {"output", {"dir"}},
};

// splitmix64: a portable, fully specified generator for the rough phases.
std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

const char* to_string(InitialCondition::Kind k) {
  switch (k) {
    case InitialCondition::Kind::kModes:
      return "modes";
    case InitialCondition::Kind::kBump:
      return "bump";
    case InitialCondition::Kind::kRough:
      return "rough";
  }
  return "?";
}

double InitialCondition::spectral_radius() const {
  switch (kind) {
    case Kind::kModes: {
      double r = 0.0;
      for (const Mode& m : modes) r = std::max(r, m.n.modulus());
      return r;
    }
    case Kind::kRough:
      return rough.kmax;
    case Kind::kBump:
      return 0.0;
  }
  return 0.0;
}

SpectralField InitialCondition::build(int grid_size) const {
  switch (kind) {
    case Kind::kModes: {
      for (const Mode& m : modes) {
        if (m.n.is_zero()) throw ConfigError("initial modes must not include n = 0");
        if (!SpectralField(grid_size).representable(m.n)) {
          throw ConfigError("initial mode (" + std::to_string(m.n.n1) + "," + std::to_string(m.n.n2) +
                            ") does not fit on M = " + std::to_string(grid_size));
        }
      }
      return SpectralField::from_modes(grid_size, modes);
    }
    case Kind::kRough: {
      if (rough.kmax < 1) throw ConfigError("rough kmax must be >= 1");
      if (!(rough.decay > 0.0)) throw ConfigError("rough decay must be positive");
      if (rough.kmax >= grid_size / 2) throw ConfigError("rough kmax does not fit on M = " + std::to_string(grid_size));
      std::vector<Mode> out;
      std::uint64_t state = seed;
      const int k = rough.kmax;
      // Lexicographically positive half plane in a fixed order.
      for (int n1 = 0; n1 <= k; ++n1) {
        for (int n2 = -k; n2 <= k; ++n2) {
          if (n1 == 0 && n2 <= 0) continue;
          const Wavenumber n{n1, n2};
          const double phase = 2.0 * std::numbers::pi * static_cast<double>(splitmix(state) >> 11) * 0x1p-53;
          if (n.modulus() > k) continue;
          out.push_back({n, std::polar(rough.amplitude * std::pow(n.modulus(), -rough.decay), phase)});
        }
      }
      return SpectralField::from_modes(grid_size, out);
    }
    case Kind::kBump:
      throw ConfigError("the bump datum depends on nu; build it with build_counterexample_family");
  }
  return SpectralField(grid_size);
}

std::vector<double> default_viscosities() {
  std::vector<double> out;
  for (int i = 0; i <= 18; ++i) out.push_back(std::pow(10.0, -1.0 - i / 6.0));
  return out;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::vector<double> out;
  for (const std::string& t : tokens(s)) out.push_back(to_double(t, "number list"));
  return out;
}

std::vector<Mode> parse_modes(std::string_view text) {
  std::vector<Mode> out;
  for (const std::string& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto t = tokens(item);
    if (t.size() != 4) throw ConfigError("mode entry needs 'n1 n2 re im', got '" + item + "'");
    out.push_back({{static_cast<int>(to_integer(t[0], "mode n1")), static_cast<int>(to_integer(t[1], "mode n2"))},
                   {to_double(t[2], "mode re"), to_double(t[3], "mode im")}});
  }
  return out;
}

ForcingSpec parse_forcing(std::string_view text) {
  ForcingSpec spec;
  for (const std::string& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto t = tokens(item);
    if (t.size() < 5) throw ConfigError("forcing entry needs 'n1 n2 kind re im [args]', got '" + item + "'");
    ForcingEntry e;
    e.n = {static_cast<int>(to_integer(t[0], "forcing n1")), static_cast<int>(to_integer(t[1], "forcing n2"))};
    e.amplitude = {to_double(t[3], "forcing re"), to_double(t[4], "forcing im")};
    const std::string& kind = t[2];
    auto expect = [&](std::size_t n) {
      if (t.size() != 5 + n) throw ConfigError("forcing kind '" + kind + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (kind == "const") {
      expect(0);
      e.profile.kind = TimeProfile::Kind::kConstant;
    } else if (kind == "sin") {
      expect(2);
      e.profile.kind = TimeProfile::Kind::kSinusoidal;
      e.profile.omega = to_double(t[5], "forcing omega");
      e.profile.phase = to_double(t[6], "forcing phase");
    } else if (kind == "ramp") {
      expect(1);
      e.profile.kind = TimeProfile::Kind::kRamp;
      e.profile.tau = to_double(t[5], "forcing tau");
      if (!(e.profile.tau > 0.0)) throw ConfigError("forcing ramp tau must be positive");
    } else if (kind == "exp") {
      expect(1);
      e.profile.kind = TimeProfile::Kind::kExponential;
      e.profile.rate = to_double(t[5], "forcing rate");
    } else {
      throw ConfigError("forcing kind must be const, sin, ramp or exp; got '" + kind + "'");
    }
    spec.entries.push_back(e);
  }
  return spec;
}

InitialCondition parse_initial_spec(std::string_view text) {
  const auto colon = text.find(':');
  InitialCondition ic;
  ic.kind = parse_kind(trim(text.substr(0, colon)));
  if (colon != std::string_view::npos) apply_parameters(ic, text.substr(colon + 1));
  return ic;
}

void set_config_value(Config& c, std::string_view section, std::string_view key, std::string_view raw) {
  const std::string sec(section), k(key);
  const auto known = kKnown.find(sec);
  if (known == kKnown.end()) throw ConfigError("unknown config section [" + sec + "]");
  if (!known->second.count(k)) throw ConfigError("unknown key '" + k + "' in [" + sec + "]");
  const std::string v = strip_comment(raw);
  const std::string what = sec + "." + k;
  auto num = [&] { return to_double(v, what); };
  auto integer = [&] { return static_cast<int>(to_integer(v, what)); };
  auto flag = [&] { return to_bool(v, what); };

  if (sec == "problem") {
    if (k == "alpha") c.alpha = num();
    if (k == "gamma") c.gamma = num();
    if (k == "cutoff") c.cutoff = num();
  } else if (sec == "sweep") {
    if (k == "T") c.t_end = num();
    if (k == "nus") c.nus = parse_number_list(v);
    if (k == "deltas") c.deltas = parse_number_list(v);
    if (k == "lambdas") c.lambdas = parse_number_list(v);
    if (k == "Ns") c.tail_grid = parse_number_list(v);
    if (k == "M_cap") c.grid_cap = integer();
    if (k == "samples") c.samples = integer();
    if (k == "cfl") c.cfl_safety = num();
    if (k == "dt_max") c.dt_max = num();
    if (k == "threshold") c.threshold = num();
    if (k == "nonlinear") c.nonlinear = flag();
    if (k == "resolution_check") c.resolution_check = flag();
    if (k == "lattice_radius") c.lattice_radius = integer();
  } else if (sec == "run") {
    if (k == "nu") c.nu = num();
    if (k == "M") c.grid_size = integer();
    if (k == "dt") c.dt = num();
    if (k == "T") c.t_end = num();
    if (k == "stride") c.stride = num();
    if (k == "adaptive") c.adaptive = flag();
    if (k == "exact_rate") c.exact_rate = num();
    if (k == "nonlinear") c.nonlinear = flag();
  } else if (sec == "initial") {
    if (k == "kind") {
      const auto kind = parse_kind(v);
      if (kind != c.initial.kind) {
        const std::uint64_t seed = c.initial.seed;
        c.initial = InitialCondition{};
        c.initial.seed = seed;
        c.initial.kind = kind;
      }
    }
    if (k == "seed") c.initial.seed = static_cast<std::uint64_t>(to_integer(v, what));
    if (k == "parameters") apply_parameters(c.initial, v);
  } else if (sec == "forcing") {
    c.forcing = parse_forcing(v);
  } else if (sec == "output") {
    if (v.empty()) throw ConfigError("output.dir must not be empty");
    c.output_dir = v;
  }
}

Config parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = kKnown.find(section);
    if (it == kKnown.end()) throw ConfigError("unknown config section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }

  Config c;
  // [initial] kind goes first: the meaning of parameters depends on it.
  if (auto v = tree.get_optional<std::string>("initial.kind")) set_config_value(c, "initial", "kind", *v);
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      if (section == "initial" && key == "kind") continue;
      set_config_value(c, section, key, value.data());
    }
  }
  if (c.nus.empty()) c.nus = default_viscosities();
  if (c.deltas.empty()) c.deltas = {0.1 * c.t_end};
  if (c.lambdas.empty()) c.lambdas = {0.5, 1.0, 2.0};
  if (c.tail_grid.empty()) c.tail_grid = {2, 4, 8, 16, 32, 64};
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void Config::validate_sweep() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ConfigError("cutoff must lie in (0, 1]");
  if (!(t_end > 0.0)) throw ConfigError("sweep T must be positive");
  if (nus.empty()) throw ConfigError("sweep needs at least one viscosity");
  for (std::size_t i = 0; i < nus.size(); ++i) {
    if (!(nus[i] > 0.0 && nus[i] < 1.0)) throw ConfigError("every nu must lie in (0, 1)");
    if (i > 0 && !(nus[i] < nus[i - 1])) throw ConfigError("nus must be strictly decreasing");
  }
  for (double d : deltas) {
    if (!(d >= 0.0 && d <= t_end)) throw ConfigError("deltas must lie in [0, T]");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("lambdas must be positive");
  }
  for (std::size_t i = 0; i < tail_grid.size(); ++i) {
    if (!(tail_grid[i] >= 0.0)) throw ConfigError("Ns must be nonnegative");
  }
  if (!is_power_of_two(grid_cap) || grid_cap < 32) throw ConfigError("M_cap must be a power of two >= 32");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (lattice_radius < 1) throw ConfigError("lattice_radius must be positive");
  if (initial.kind == InitialCondition::Kind::kBump) {
    initial.bump.validate();
    if (!forcing.empty()) throw ConfigError("the bump family is unforced; remove [forcing] entries");
  }
}

void Config::validate_run() const {
  run_params().validate();
  if (!(stride >= 0.0)) throw ConfigError("stride must be nonnegative");
  if (initial.kind == InitialCondition::Kind::kBump) {
    initial.bump.validate();
    if (!forcing.empty()) throw ConfigError("the bump family is unforced; remove [forcing] entries");
  }
}

SimParams Config::run_params() const {
  SimParams p;
  p.alpha = alpha;
  p.gamma = gamma;
  p.nu = nu;
  p.grid_size = grid_size;
  p.dt = dt;
  p.t_end = t_end;
  p.dealias.cutoff_fraction = cutoff;
  p.nonlinear = nonlinear && initial.kind != InitialCondition::Kind::kBump;
  return p;
}

}  // namespace gsqg
