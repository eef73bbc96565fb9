#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liquid/divstats.hpp"
#include "liquid/engineering.hpp"
#include "liquid/qp.hpp"
#include "liquid/splines.hpp"
#include "liquid/table.hpp"

namespace liquid::scorecard {

// A sentinel code matched by exact numeric equality.
struct SpecialValue {
  double value = 0.0;
  std::string label;
};

// Half-open interval [low, high); either end may be infinite.
struct DiscreteBin {
  double low = 0.0;
  double high = 0.0;
  std::string label;

  bool contains(double x) const { return low <= x && x < high; }
};

// Continuous part of a characteristic. Values are clamped to the end knots
// before the basis is evaluated.
struct LiquidPart {
  splines::KnotVector knots{{0.0, 1.0}};
  int order = 4;
  bool log_axis = false;
  std::optional<double> roughness_weight;  // overrides the fit-level weight
  std::vector<double> traditional_weights;  // optional, m-1 step heights for plots

  double clamp_low() const { return knots.front(); }
  double clamp_high() const { return knots.back(); }
};

struct CharacteristicSpec {
  std::string name;
  std::string source_column;
  std::vector<SpecialValue> special_values;
  std::vector<DiscreteBin> discrete_bins;
  std::optional<LiquidPart> liquid;
};

// Records whose split column holds one of `validation_values` form the
// validation set; the rest are development records.
struct SplitRule {
  std::string column;
  std::vector<double> validation_values;
};

enum class Layout {
  kSectioned,  // purely discrete indicators, then discrete parts of liquid
               // characteristics, then all basis blocks
  kGrouped,    // each characteristic's coefficients contiguous
};

struct ScorecardSpec {
  std::vector<CharacteristicSpec> characteristics;
  engineering::ConstraintSet constraints;  // resolved, 0-based
  double lambda = 0.0;
  double roughness_weight = 0.0;
  std::optional<SplitRule> split;
  std::string label_column = "good";
  Layout layout = Layout::kSectioned;
  std::optional<Eigen::VectorXd> start_point;
  qp::Options qp_options;
};

enum class ColumnKind { kIndicator, kBasis };

struct ColumnInfo {
  int characteristic = 0;
  std::string characteristic_name;
  std::string label;
  ColumnKind kind = ColumnKind::kIndicator;
  int basis_position = -1;  // 0-based within the block, -1 for indicators
};

struct CharacteristicColumns {
  std::vector<int> special;  // one per special value
  std::vector<int> bins;     // one per discrete bin
  int basis_begin = -1;
  int basis_size = 0;

  std::vector<int> all() const;
};

// Coefficient numbering: a pure function of the spec.
struct CoefficientLayout {
  std::vector<ColumnInfo> columns;
  std::vector<CharacteristicColumns> per_characteristic;

  int size() const { return static_cast<int>(columns.size()); }
  // -1 when no coefficient carries that (characteristic, label).
  int find(const std::string& characteristic, const std::string& label) const;
  std::vector<std::vector<int>> centering_groups() const;
};

CoefficientLayout coefficient_layout(const ScorecardSpec& spec);

// Checks the characteristic definitions (names, bins, liquid parts).
void validate(const ScorecardSpec& spec);

struct DesignMatrix {
  Eigen::MatrixXd values;
  CoefficientLayout layout;
};

DesignMatrix build_design_matrix(const ScorecardSpec& spec, const Table& records);

divstats::Labels read_labels(const ScorecardSpec& spec, const Table& records);

struct SplitIndices {
  std::vector<int> dev;
  std::vector<int> val;
};

SplitIndices split(const Table& records, const std::optional<SplitRule>& rule);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, std::span<const int> rows);
divstats::Labels select_labels(const divstats::Labels& y, std::span<const int> rows);

// The QP assembled for a spec on development data.
struct FitProblem {
  divstats::DivStats stats;
  engineering::ConstraintMatrices constraints;
  qp::Problem qp;
};

FitProblem build_fit_problem(const ScorecardSpec& spec, const Eigen::MatrixXd& X_dev,
                             const divstats::Labels& y_dev, const CoefficientLayout& layout);

struct PlotSeries {
  std::vector<double> x_step;  // empty when no traditional weights are known
  std::vector<double> y_step;
  std::vector<double> x_liquid;
  std::vector<double> y_liquid;
  bool log_axis = false;
};

struct NamedPlotSeries {
  std::string characteristic;
  PlotSeries series;
};

struct FitResult {
  CoefficientLayout layout;
  Eigen::VectorXd coeffs_raw;
  double beta = 0.0;
  Eigen::VectorXd coeffs_woe;
  double dev_divergence = 0.0;
  std::optional<double> val_divergence;  // absent when the validation set is degenerate
  int n_dev = 0;
  int n_val = 0;
  qp::Solution qp;
  qp::KktReport kkt;
  engineering::Residuals residuals;  // of coeffs_raw against the assembled constraints
  std::vector<NamedPlotSeries> plots;
};

// build -> split -> divergence_stats -> H -> assemble -> solve -> WOE ->
// validation divergence. Errors carry the failing stage.
FitResult fit(const ScorecardSpec& spec, const Table& records);

// Height of the half-open attribute interval containing x; the last
// interval is closed.
double step_eval(double x, std::span<const double> attribute_weights,
                 const splines::KnotVector& attribute_knots);

// m_points + 1 abscissae spanning the knot range, uniform either on the raw
// scale or (log mode) on log10 of x, or of x + 1 when the first knot is 0.
std::vector<double> axis_points(bool log_mode, int m_points,
                                const splines::KnotVector& knots);

PlotSeries plot_series(const LiquidPart& liquid, std::span<const double> traditional_weights,
                       std::span<const double> liquid_coeffs, int m_points = 100);

// Liquid coefficients of one characteristic, sliced out of a full vector.
std::vector<double> liquid_coefficients(const CoefficientLayout& layout, int characteristic,
                                        const Eigen::VectorXd& coeffs);

std::vector<NamedPlotSeries> plot_all(const ScorecardSpec& spec, const CoefficientLayout& layout,
                                      const Eigen::VectorXd& coeffs, int m_points = 100);

}  // namespace liquid::scorecard
