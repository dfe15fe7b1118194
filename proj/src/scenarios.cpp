#include "gsqg/scenarios.hpp"

#include <array>
#include <utility>

#include "gsqg/errors.hpp"

namespace gsqg {
namespace {

// Fixed low-mode datum, unforced, at the critical pair alpha = gamma = 1/2.
constexpr const char* kSmoothCompact = R"ini(
[problem]
alpha = 0.5
gamma = 0.5

[sweep]
nus = 1e-1, 3e-2, 1e-2, 3e-3, 1e-3
T = 1
deltas = 0.01, 0.03, 0.1, 0.3
lambdas = 0.5, 1, 2
Ns = 2, 4, 8, 16, 32, 64
M_cap = 512
samples = 100
cfl = 0.8
dt_max = 0.01
resolution_check = true

[initial]
kind = modes
parameters = 1 0 0.25 0; 0 1 0 0.25; 1 1 0.15 0.1; 2 -1 0.1 0; 1 2 0 0.1

[output]
dir = out/smooth-compact
)ini";

// Rescaled fractional heat flow of a radial bump; evaluated exactly.
constexpr const char* kCounterexample = R"ini(
[problem]
alpha = 0.5
gamma = 0.5

[sweep]
nus = 1e-2, 3e-3, 1e-3, 3e-4
T = 1
deltas = 0.001, 0.01, 0.1
lambdas = 0.5, 1, 2
Ns = 2, 4, 8, 16, 32, 64, 128, 256
M_cap = 512
samples = 100

[initial]
kind = bump
parameters = r0=2 k=8 amplitude=1

[output]
dir = out/counterexample
)ini";

// gamma = 1 vanishing-viscosity sweep from a rough, seeded datum.
constexpr const char* kGlobalExistence = R"ini(
[problem]
alpha = 0.5
gamma = 1

[sweep]
nus = 1e-2, 3e-3, 1e-3, 3e-4
T = 1
deltas = 0.1
lambdas = 0.5, 1, 2
Ns = 2, 4, 8, 16, 32
M_cap = 512
samples = 50
cfl = 0.8
dt_max = 0.01
resolution_check = true

[initial]
kind = rough
parameters = decay=1.55 kmax=16 amplitude=0.1
seed = 20240517

[output]
dir = out/global-existence
)ini";

// Supercritical pair alpha + gamma < 1; runs until T or the blow-up guard.
constexpr const char* kSupercriticalProbe = R"ini(
[problem]
alpha = 0.2
gamma = 0.3

[sweep]
nus = 1e-1, 1e-2, 1e-3
T = 1
deltas = 0.1
lambdas = 0.5, 1, 2
Ns = 2, 4, 8, 16, 32
M_cap = 256
samples = 50
cfl = 0.8
dt_max = 0.01

[initial]
kind = modes
parameters = 1 0 0.3 0; 0 1 0 0.3; 1 1 0.2 0.1

[output]
dir = out/supercritical-probe
)ini";

// Single-run presets.
constexpr const char* kPureDissipation = R"ini(
[problem]
alpha = 0.5
gamma = 1

[run]
nu = 0.1
M = 32
dt = 0.05
T = 1
stride = 0.1
nonlinear = false

[initial]
kind = modes
parameters = 3 4 0.5 0; 1 -2 0 0.25

[output]
dir = out/pure-dissipation
)ini";

// theta* = e^{-t} (cos x1 + cos 2x1 / 2) / 2 with forcing (nu |n|^2 - 1) theta*(n).
constexpr const char* kManufactured = R"ini(
[problem]
alpha = 0.5
gamma = 1

[run]
nu = 6
M = 16
dt = 0.01
T = 1
stride = 0.1
exact_rate = -1

[initial]
kind = modes
parameters = 1 0 0.5 0; 2 0 0.25 0

[forcing]
entries = 1 0 exp 2.5 0 -1; 2 0 exp 5.75 0 -1

[output]
dir = out/manufactured
)ini";

constexpr std::array<std::pair<const char*, const char*>, 2> kRunPresets = {{
    {"pure-dissipation", kPureDissipation},
    {"manufactured", kManufactured},
}};

constexpr std::array<std::pair<const char*, const char*>, 4> kPresets = {{
    {"smooth-compact", kSmoothCompact},
    {"counterexample", kCounterexample},
    {"global-existence", kGlobalExistence},
    {"supercritical-probe", kSupercriticalProbe},
}};

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : kPresets) out.emplace_back(name);
  return out;
}

std::string scenario_text(std::string_view name) {
  for (const auto& [n, text] : kPresets) {
    if (name == n) return text;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

Config scenario_config(std::string_view name) { return parse_config(scenario_text(name)); }

std::vector<std::string> run_preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : kRunPresets) out.emplace_back(name);
  return out;
}

std::string run_preset_text(std::string_view name) {
  for (const auto& [n, text] : kRunPresets) {
    if (name == n) return text;
  }
  throw ConfigError("unknown run preset '" + std::string(name) + "'");
}

}  // namespace gsqg
