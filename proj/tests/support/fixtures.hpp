#pragma once

// Synthetic credit data and matching scorecard specs shared by the scorecard
// tests and the acceptance suite.

#include <cstdint>
#include <string>

#include "liquid/csv.hpp"
#include "liquid/scorecard.hpp"
#include "liquid/spec_file.hpp"
#include "liquid/synthetic.hpp"

namespace fixture {

// Shapes of the true score of the continuous characteristic.
enum class Curve {
  kDecreasing,  // smooth, monotone decreasing through the knot range
  kValley,      // decreasing then increasing, with sparse data near the bottom
};

inline std::string curve_json(Curve curve) {
  switch (curve) {
    case Curve::kDecreasing:
      return R"({"type": "spline", "knots": [0, 5, 25, 35, 300, 1000], "order": 4,
                 "coeffs": [1.0, 0.8, 0.5, 0.3, -0.2, -0.6, -0.8, -0.9]})";
    case Curve::kValley:
      return R"({"type": "spline", "knots": [0, 5, 25, 35, 300, 1000], "order": 4,
                 "coeffs": [0.6, 0.2, -0.3, -0.6, -0.4, 0.1, 0.5, 0.7]})";
  }
  return "";
}

inline std::string config_json(std::uint64_t seed, int n, Curve curve = Curve::kDecreasing) {
  return R"({
  "seed": )" + std::to_string(seed) + R"(,
  "n_records": )" + std::to_string(n) + R"(,
  "class_balance": 0.8,
  "characteristics": [
    {"name": "tenure", "distribution": {"type": "uniform", "low": 0, "high": 120}, "integer": true,
     "truth": {"type": "step", "knots": [0, 12, 36, 120], "weights": [-0.4, 0.1, 0.5]}},
    {"name": "inquiries",
     "distribution": {"type": "choice", "values": [0, 1, 2, 3, 4], "probs": [0.4, 0.25, 0.15, 0.1, 0.1]},
     "truth": {"type": "table", "values": [0, 1, 2, 3, 4], "scores": [0.4, 0.2, 0.0, -0.2, -0.5]}},
    {"name": "region", "distribution": {"type": "choice", "values": [1, 2, 3], "probs": [0.5, 0.3, 0.2]},
     "truth": {"type": "table", "values": [1, 2, 3], "scores": [0.1, 0.1, -0.2]}},
    {"name": "days_since_payment", "distribution": {"type": "exponential", "scale": 120},
     "special_values": [{"value": -1, "probability": 0.05, "score": -0.3}],
     "truth": )" + curve_json(curve) + R"(}
  ]
})";
}

struct SpecOptions {
  int order = 4;
  bool liquid_as_bins = false;     // traditional indicators in place of the liquid part
  bool grouped = false;
  bool basis_pattern = true;       // decreasing pattern across the liquid coefficients
  bool engineering = true;         // in-weights, crosses, centering, discrete patterns
  double roughness_weight = 0.0;
  double lambda = 0.0;
};

inline std::string spec_json(const SpecOptions& o) {
  const int q = 6 + o.order - 2;  // basis functions on six knots
  std::string days;
  if (o.liquid_as_bins) {
    // Labels B1..B5 let the basis_range pattern below resolve against the bins.
    days = R"({"name": "days_since_payment",
      "special_values": [{"value": -1, "label": "none"}],
      "bins": [{"low": null, "high": 5, "label": "B1"}, {"low": 5, "high": 25, "label": "B2"},
               {"low": 25, "high": 35, "label": "B3"}, {"low": 35, "high": 300, "label": "B4"},
               {"low": 300, "high": null, "label": "B5"}]})";
  } else {
    days = R"({"name": "days_since_payment",
      "special_values": [{"value": -1, "label": "none"}],
      "liquid": {"knots": [0, 5, 25, 35, 300, 1000], "order": )" +
           std::to_string(o.order) + R"(, "log_axis": true}})";
  }
  std::string constraints = R"("constraints": {)";
  std::string sep;
  if (o.engineering) {
    constraints += R"(
    "inweights": [{"characteristic": "region", "label": "r3"}],
    "crosses": [[{"characteristic": "region", "label": "r1"}, {"characteristic": "region", "label": "r2"}]],
    "centering_groups": "auto-per-characteristic",
    "patterns": [
      {"chain": [{"characteristic": "tenure", "label": "lt12"}, {"characteristic": "tenure", "label": "12to36"},
                 {"characteristic": "tenure", "label": "ge36"}], "direction": "<"},
      {"chain": [{"characteristic": "inquiries", "label": "0"}, {"characteristic": "inquiries", "label": "1"},
                 {"characteristic": "inquiries", "label": "2"}, {"characteristic": "inquiries", "label": "3plus"}],
       "direction": ">"})";
    sep = ",";
  }
  if (o.basis_pattern) {
    const int last = o.liquid_as_bins ? 5 : q;
    if (!o.engineering) constraints += R"(
    "patterns": [)";
    constraints += sep + R"(
      {"characteristic": "days_since_payment", "basis_range": [1, )" + std::to_string(last) +
                   R"(], "direction": ">"})";
  }
  if (o.engineering || o.basis_pattern) constraints += "]";
  constraints += "\n  }";
  return R"({
  "characteristics": [
    {"name": "tenure", "bins": [{"low": null, "high": 12, "label": "lt12"},
                                {"low": 12, "high": 36, "label": "12to36"},
                                {"low": 36, "high": null, "label": "ge36"}]},
    {"name": "inquiries", "bins": [{"low": null, "high": 1, "label": "0"}, {"low": 1, "high": 2, "label": "1"},
                                   {"low": 2, "high": 3, "label": "2"}, {"low": 3, "high": null, "label": "3plus"}]},
    {"name": "region", "bins": [{"low": null, "high": 2, "label": "r1"}, {"low": 2, "high": 3, "label": "r2"},
                                {"low": 3, "high": null, "label": "r3"}]},
    )" + days + R"(
  ],
  )" + constraints + R"(,
  "fit": {"delta": 1.0, "lambda": )" + liquid::io::format_number(o.lambda) +
         R"(, "roughness_weight": )" + liquid::io::format_number(o.roughness_weight) +
         R"(, "split": {"column": "sn", "validation_values": [8, 9, 10]}, "layout": ")" +
         (o.grouped ? "grouped" : "sectioned") + R"("}
})";
}

inline liquid::scorecard::ScorecardSpec spec(const SpecOptions& o) {
  return liquid::io::parse_spec(spec_json(o), "<fixture>");
}

inline liquid::Table data(std::uint64_t seed, int n, Curve curve = Curve::kDecreasing) {
  return liquid::synthetic::generate(liquid::synthetic::parse_config(config_json(seed, n, curve))).table;
}

}  // namespace fixture
