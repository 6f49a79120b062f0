#include "switchbound/demos.hpp"

#include "switchbound/error.hpp"

namespace switchbound {

namespace {

// Boost converter in per-unit: x = (i_l, 5 v_c), x_c = 70, x_l = 3, r_c = 0.005,
// r_l = 0.05, r_o = 1, v_s = 1.
constexpr std::string_view kDcdc = R"json({
  "name": "dcdc",
  "dimension": 2,
  "modes": [
    {
      "name": "on",
      "A": [["-0.05/3", 0], [0, "-1/(70*(1+0.005))"]],
      "b": ["1/3", 0]
    },
    {
      "name": "off",
      "A": [["-(0.05+1*0.005/(1+0.005))/3", "-(1/(1+0.005))/(3*5)"],
            ["5*(1/(1+0.005))/70", "-1/(70*(1+0.005))"]],
      "b": ["1/3", 0]
    }
  ],
  "tau": 0.5,
  "delta0": 0.0005,
  "safe_box": {"lower": [1.3, 5.7], "upper": [1.7, 5.8]},
  "certificate": {
    "kind": "common",
    "V": {"M": [[1.0224, 0.0084], [0.0084, 1.0031]]},
    "alpha_lo": {"linear": 1},
    "alpha_hi": {"linear": 1.0127},
    "gamma": {"linear": 1.0127},
    "kappa": 0.014,
    "nu": 0.41
  },
  "workflow": {
    "epsilon2": 0.015,
    "grid_cap": 5000000,
    "dt": 0.0005,
    "seed": 1,
    "trials": 100,
    "horizon": 100,
    "check_grid": 41
  }
})json";

// Drain-and-valve tank: OFF x' = -a sqrt(x), ON x' = b (c - x), a = 1/5, b = 1/10, c = 11.
constexpr std::string_view kWatertank = R"json({
  "name": "watertank",
  "dimension": 1,
  "modes": [
    {"name": "off", "f": ["-(1/5)*sqrt(x1)"]},
    {"name": "on", "f": ["(1/10)*(11-x1)"]}
  ],
  "tau": 10,
  "delta0": 0.1,
  "safe_box": {"lower": [1], "upper": [10]},
  "certificate": {
    "kind": "multiple",
    "V": {"off": "abs(exp(sqrt(x1))-exp(sqrt(y1)))", "on": "sqrt(6)*abs(x1-y1)"},
    "alpha_lo": {"linear": 1},
    "alpha_hi": {"linear": 3.74},
    "gamma": {"linear": 3.74},
    "kappa": 0.1,
    "mu": "2*sqrt(6)/3",
    "nu": 2.94
  },
  "workflow": {
    "epsilon2": 0.015,
    "dt": 0.05,
    "seed": 1,
    "trials": 100,
    "horizon": 50,
    "check_grid": 201
  },
  "controller": {"type": "threshold", "axis": 1, "level": 5.5, "below": "on", "above": "off"}
})json";

}  // namespace

std::vector<std::string> demo_names() { return {"dcdc", "watertank"}; }

std::string_view demo_config_text(std::string_view name) {
    if (name == "dcdc") return kDcdc;
    if (name == "watertank") return kWatertank;
    throw ValidationError("unknown demo '" + std::string(name) + "' (expected dcdc or watertank)");
}

SystemConfig demo_config(std::string_view name) { return parse_config(std::string(demo_config_text(name))); }

}  // namespace switchbound
