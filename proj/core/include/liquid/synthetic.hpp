#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "liquid/table.hpp"

// Seeded synthetic scorecard data: characteristic columns, a 0/1 label drawn
// with probability logistic(intercept + sum of true characteristic scores),
// and a sample-number column.
namespace liquid::synthetic {

enum class DistributionKind { kUniform, kLogUniform, kNormal, kExponential, kChoice };

struct Distribution {
  DistributionKind kind = DistributionKind::kUniform;
  double a = 0.0;  // low / mean / scale
  double b = 1.0;  // high / sd
  std::vector<double> values;  // kChoice
  std::vector<double> probs;   // kChoice
};

enum class TruthKind { kStep, kSpline, kTable, kZero };

// True score of a characteristic value. Step and spline truths are evaluated
// at the value clamped to their knot range.
struct Truth {
  TruthKind kind = TruthKind::kZero;
  std::vector<double> knots;
  int order = 4;
  std::vector<double> weights;  // step heights, spline coefficients or table scores
  std::vector<double> values;   // kTable keys
};

struct SpecialCode {
  double value = 0.0;
  double probability = 0.0;
  double score = 0.0;
};

struct CharacteristicConfig {
  std::string name;
  Distribution distribution;
  bool integer = false;
  std::vector<SpecialCode> special_values;
  Truth truth;
};

struct SyntheticConfig {
  std::uint64_t seed = 0;
  int n_records = 0;
  std::optional<double> class_balance;  // target mean of P(good); overrides intercept
  double intercept = 0.0;
  std::string label_column = "good";
  std::string sample_column = "sn";
  std::vector<double> sample_values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<CharacteristicConfig> characteristics;
};

SyntheticConfig parse_config(const std::string& json_text,
                             const std::string& source = "<config>");
SyntheticConfig read_config_file(const std::string& path);

double true_score(const CharacteristicConfig& c, double value);

struct Dataset {
  Table table;
  std::vector<double> probability;  // P(good) per record
  double intercept = 0.0;
};

Dataset generate(const SyntheticConfig& config);

}  // namespace liquid::synthetic
