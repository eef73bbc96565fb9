#include "liquid/scorecard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "liquid/error.hpp"

namespace liquid::scorecard {
namespace {

std::string describe_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool is_liquid(const CharacteristicSpec& c) { return c.liquid.has_value(); }

double effective_roughness(const ScorecardSpec& spec, const LiquidPart& liquid) {
  return liquid.roughness_weight.value_or(spec.roughness_weight);
}

}  // namespace

std::vector<int> CharacteristicColumns::all() const {
  std::vector<int> out = special;
  out.insert(out.end(), bins.begin(), bins.end());
  for (int k = 0; k < basis_size; ++k) out.push_back(basis_begin + k);
  std::sort(out.begin(), out.end());
  return out;
}

int CoefficientLayout::find(const std::string& characteristic,
                            const std::string& label) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].characteristic_name == characteristic && columns[j].label == label) {
      return static_cast<int>(j);
    }
  }
  return -1;
}

std::vector<std::vector<int>> CoefficientLayout::centering_groups() const {
  std::vector<std::vector<int>> groups;
  for (const CharacteristicColumns& c : per_characteristic) groups.push_back(c.all());
  return groups;
}

void validate(const ScorecardSpec& spec) {
  constexpr const char* kStage = "spec";
  if (spec.characteristics.empty()) throw_invalid(kStage, "no characteristics declared");
  if (!(spec.lambda >= 0.0)) throw_invalid(kStage, "lambda must be non-negative");
  if (!(spec.roughness_weight >= 0.0)) {
    throw_invalid(kStage, "roughness_weight must be non-negative");
  }
  std::set<std::string> names;
  for (const CharacteristicSpec& c : spec.characteristics) {
    const std::string where = "characteristic '" + c.name + "': ";
    if (c.name.empty()) throw_invalid(kStage, "characteristic with empty name");
    if (!names.insert(c.name).second) throw_invalid(kStage, where + "duplicate name");
    if (c.source_column.empty()) throw_invalid(kStage, where + "empty source column");
    if (c.special_values.empty() && c.discrete_bins.empty() && !c.liquid) {
      throw_invalid(kStage, where + "needs special values, bins or a liquid part");
    }
    std::set<std::string> labels;
    for (const SpecialValue& s : c.special_values) {
      if (!std::isfinite(s.value)) throw_invalid(kStage, where + "special value must be finite");
      if (!labels.insert(s.label).second) {
        throw_invalid(kStage, where + "duplicate attribute label '" + s.label + "'");
      }
    }
    for (std::size_t i = 0; i < c.discrete_bins.size(); ++i) {
      const DiscreteBin& b = c.discrete_bins[i];
      if (std::isnan(b.low) || std::isnan(b.high) || !(b.low < b.high)) {
        throw_invalid(kStage, where + "bin '" + b.label + "' needs low < high");
      }
      if (!labels.insert(b.label).second) {
        throw_invalid(kStage, where + "duplicate attribute label '" + b.label + "'");
      }
      for (std::size_t k = 0; k < i; ++k) {
        const DiscreteBin& o = c.discrete_bins[k];
        if (b.low < o.high && o.low < b.high) {
          throw_invalid(kStage, where + "bins '" + o.label + "' and '" + b.label + "' overlap");
        }
      }
    }
    if (c.liquid) {
      const LiquidPart& l = *c.liquid;
      if (l.order < 1 || l.order > splines::kMaxOrder) {
        throw_invalid(kStage, where + "liquid order must be 1..4");
      }
      if (!l.traditional_weights.empty() &&
          static_cast<int>(l.traditional_weights.size()) != l.knots.size() - 1) {
        throw_invalid(kStage, where + "traditional_weights needs one weight per knot interval");
      }
      if (l.log_axis && l.knots.front() < 0.0) {
        throw_invalid(kStage, where + "log axis requires a non-negative first knot");
      }
      const double w = effective_roughness(spec, l);
      if (!(w >= 0.0)) throw_invalid(kStage, where + "roughness weight must be non-negative");
      if (l.roughness_weight && *l.roughness_weight > 0.0 && l.order != 4) {
        throw_invalid(kStage, where + "roughness penalty is defined for order 4 only");
      }
      for (int k = 0; k < l.order + l.knots.size() - 2; ++k) {
        if (labels.count("B" + std::to_string(k + 1))) {
          throw_invalid(kStage, where + "attribute label 'B" + std::to_string(k + 1) +
                                    "' collides with a basis coefficient label");
        }
      }
    }
  }
}

CoefficientLayout coefficient_layout(const ScorecardSpec& spec) {
  validate(spec);
  CoefficientLayout layout;
  const auto nchar = spec.characteristics.size();
  layout.per_characteristic.resize(nchar);

  auto add_discrete = [&](std::size_t ci) {
    const CharacteristicSpec& c = spec.characteristics[ci];
    CharacteristicColumns& cols = layout.per_characteristic[ci];
    for (const SpecialValue& s : c.special_values) {
      cols.special.push_back(layout.size());
      layout.columns.push_back({static_cast<int>(ci), c.name, s.label, ColumnKind::kIndicator, -1});
    }
    for (const DiscreteBin& b : c.discrete_bins) {
      cols.bins.push_back(layout.size());
      layout.columns.push_back({static_cast<int>(ci), c.name, b.label, ColumnKind::kIndicator, -1});
    }
  };
  auto add_basis = [&](std::size_t ci) {
    const CharacteristicSpec& c = spec.characteristics[ci];
    if (!c.liquid) return;
    CharacteristicColumns& cols = layout.per_characteristic[ci];
    cols.basis_begin = layout.size();
    cols.basis_size = splines::basis_count(c.liquid->knots.size(), c.liquid->order);
    for (int k = 0; k < cols.basis_size; ++k) {
      layout.columns.push_back(
          {static_cast<int>(ci), c.name, "B" + std::to_string(k + 1), ColumnKind::kBasis, k});
    }
  };

  if (spec.layout == Layout::kGrouped) {
    for (std::size_t ci = 0; ci < nchar; ++ci) {
      add_discrete(ci);
      add_basis(ci);
    }
  } else {
    for (std::size_t ci = 0; ci < nchar; ++ci) {
      if (!is_liquid(spec.characteristics[ci])) add_discrete(ci);
    }
    for (std::size_t ci = 0; ci < nchar; ++ci) {
      if (is_liquid(spec.characteristics[ci])) add_discrete(ci);
    }
    for (std::size_t ci = 0; ci < nchar; ++ci) add_basis(ci);
  }
  return layout;
}

DesignMatrix build_design_matrix(const ScorecardSpec& spec, const Table& records) {
  constexpr const char* kStage = "design";
  DesignMatrix dm;
  dm.layout = coefficient_layout(spec);
  const auto n = static_cast<Eigen::Index>(records.rows());
  dm.values = Eigen::MatrixXd::Zero(n, dm.layout.size());

  for (std::size_t ci = 0; ci < spec.characteristics.size(); ++ci) {
    const CharacteristicSpec& c = spec.characteristics[ci];
    const CharacteristicColumns& cols = dm.layout.per_characteristic[ci];
    if (records.find(c.source_column) < 0) {
      throw_invalid(kStage, "characteristic '" + c.name + "': data has no column '" +
                                c.source_column + "'");
    }
    const std::vector<double>& v = records.column(c.source_column);

    std::vector<Eigen::Index> liquid_rows;
    std::vector<double> liquid_values;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double x = v[static_cast<std::size_t>(r)];
      bool matched = false;
      for (std::size_t s = 0; s < c.special_values.size() && !matched; ++s) {
        if (x == c.special_values[s].value) {
          dm.values(r, cols.special[s]) = 1.0;
          matched = true;
        }
      }
      for (std::size_t b = 0; b < c.discrete_bins.size() && !matched; ++b) {
        if (c.discrete_bins[b].contains(x)) {
          dm.values(r, cols.bins[b]) = 1.0;
          matched = true;
        }
      }
      if (matched) continue;
      if (c.liquid && !std::isnan(x)) {
        liquid_rows.push_back(r);
        liquid_values.push_back(c.liquid->knots.clamp(x));
        continue;
      }
      throw_invalid(kStage, "characteristic '" + c.name + "', record " + std::to_string(r + 1) +
                                ": value " + describe_value(x) +
                                " matches no attribute");
    }
    if (!liquid_rows.empty()) {
      const splines::BasisBlock block =
          splines::basis_block(liquid_values, c.liquid->knots, c.liquid->order);
      for (std::size_t k = 0; k < liquid_rows.size(); ++k) {
        dm.values.block(liquid_rows[k], cols.basis_begin, 1, cols.basis_size) =
            block.values.row(static_cast<Eigen::Index>(k));
      }
    }
  }
  return dm;
}

divstats::Labels read_labels(const ScorecardSpec& spec, const Table& records) {
  if (records.find(spec.label_column) < 0) {
    throw_invalid("labels", "data has no label column '" + spec.label_column + "'");
  }
  const std::vector<double>& col = records.column(spec.label_column);
  divstats::Labels y(col.size());
  for (std::size_t r = 0; r < col.size(); ++r) {
    if (col[r] != 0.0 && col[r] != 1.0) {
      throw_invalid("labels", "record " + std::to_string(r + 1) + ": label " +
                                  describe_value(col[r]) + " is not 0 or 1");
    }
    y[r] = static_cast<int>(col[r]);
  }
  return y;
}

SplitIndices split(const Table& records, const std::optional<SplitRule>& rule) {
  SplitIndices out;
  const auto n = static_cast<int>(records.rows());
  if (!rule) {
    out.dev.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) out.dev[static_cast<std::size_t>(r)] = r;
    return out;
  }
  if (records.find(rule->column) < 0) {
    throw_invalid("split", "data has no split column '" + rule->column + "'");
  }
  const std::vector<double>& sn = records.column(rule->column);
  for (int r = 0; r < n; ++r) {
    const double v = sn[static_cast<std::size_t>(r)];
    const bool is_val = std::find(rule->validation_values.begin(),
                                  rule->validation_values.end(), v) !=
                        rule->validation_values.end();
    (is_val ? out.val : out.dev).push_back(r);
  }
  return out;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& X, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = X.row(rows[k]);
  }
  return out;
}

divstats::Labels select_labels(const divstats::Labels& y, std::span<const int> rows) {
  divstats::Labels out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
  return out;
}

FitProblem build_fit_problem(const ScorecardSpec& spec, const Eigen::MatrixXd& X_dev,
                             const divstats::Labels& y_dev, const CoefficientLayout& layout) {
  FitProblem fp;
  fp.stats = divstats::divergence_stats(X_dev, y_dev);

  std::vector<divstats::RoughnessBlock> blocks;
  for (std::size_t ci = 0; ci < spec.characteristics.size(); ++ci) {
    const CharacteristicSpec& c = spec.characteristics[ci];
    if (!c.liquid || c.liquid->order != 4) continue;
    const double w = effective_roughness(spec, *c.liquid);
    if (w <= 0.0) continue;
    blocks.push_back({layout.per_characteristic[ci].basis_begin,
                      splines::roughness_matrix(c.liquid->knots), w});
  }
  const Eigen::MatrixXd H = divstats::h_matrix_with_roughness(fp.stats.C, spec.lambda, blocks);

  fp.constraints = engineering::assemble(fp.stats, spec.constraints);

  const Eigen::Index p = H.rows();
  fp.qp.H = H;
  fp.qp.f = Eigen::VectorXd::Zero(p);
  fp.qp.A = fp.constraints.A;
  fp.qp.b = fp.constraints.b;
  fp.qp.Aeq = fp.constraints.Aeq;
  fp.qp.beq = fp.constraints.beq;
  if (spec.start_point) {
    if (spec.start_point->size() != p) {
      throw_invalid("start", "start point has " + std::to_string(spec.start_point->size()) +
                                 " entries, expected " + std::to_string(p));
    }
    fp.qp.start = spec.start_point;
  }
  return fp;
}

FitResult fit(const ScorecardSpec& spec, const Table& records) {
  const DesignMatrix dm = build_design_matrix(spec, records);
  const divstats::Labels y = read_labels(spec, records);
  const SplitIndices parts = split(records, spec.split);
  const Eigen::MatrixXd X_dev = select_rows(dm.values, parts.dev);
  const divstats::Labels y_dev = select_labels(y, parts.dev);

  FitResult out;
  out.layout = dm.layout;
  out.n_dev = static_cast<int>(parts.dev.size());
  out.n_val = static_cast<int>(parts.val.size());

  const FitProblem fp = build_fit_problem(spec, X_dev, y_dev, dm.layout);
  out.qp = qp::solve(fp.qp, spec.qp_options);
  if (out.qp.status == qp::Status::kInfeasible) {
    throw_infeasible("qp", "score engineering constraints admit no solution");
  }
  if (out.qp.status == qp::Status::kMaxIter) {
    throw_numerical("qp", "iteration cap reached after " + std::to_string(out.qp.iterations) +
                              " iterations");
  }
  out.kkt = qp::kkt_report(fp.qp, out.qp);
  out.coeffs_raw = out.qp.x;
  out.residuals = engineering::residuals(fp.constraints, out.coeffs_raw);

  const divstats::WoeResult woe = divstats::woe_scale(out.coeffs_raw, X_dev, y_dev);
  out.beta = woe.beta;
  out.coeffs_woe = woe.coeffs_woe;
  out.dev_divergence = woe.div;

  if (!parts.val.empty()) {
    const divstats::Labels y_val = select_labels(y, parts.val);
    const auto goods = std::count(y_val.begin(), y_val.end(), 1);
    const auto bads = static_cast<long>(y_val.size()) - goods;
    if (goods >= 2 && bads >= 2) {
      out.val_divergence = divstats::score_divergence(
          out.coeffs_woe, select_rows(dm.values, parts.val), y_val);
    }
  }
  out.plots = plot_all(spec, out.layout, out.coeffs_woe);
  return out;
}

double step_eval(double x, std::span<const double> weights,
                 const splines::KnotVector& knots) {
  const int na = static_cast<int>(weights.size());
  if (na != knots.size() - 1) {
    throw_invalid("step", "need " + std::to_string(knots.size() - 1) +
                              " attribute weights, got " + std::to_string(na));
  }
  if (!knots.contains(x)) {
    throw_invalid("step", "x=" + describe_value(x) + " outside attribute knots");
  }
  for (int i = 0; i + 1 < na; ++i) {
    if (knots[i] <= x && x < knots[i + 1]) return weights[static_cast<std::size_t>(i)];
  }
  return weights[static_cast<std::size_t>(na - 1)];
}

std::vector<double> axis_points(bool log_mode, int m_points,
                                const splines::KnotVector& knots) {
  if (m_points < 1) throw_invalid("axis", "need at least one plot interval");
  double lo = knots.front();
  double hi = knots.back();
  bool shifted = false;
  if (log_mode) {
    if (lo < 0.0) throw_invalid("axis", "log axis requires a non-negative first knot");
    if (lo == 0.0) {
      shifted = true;
      lo += 1.0;
      hi += 1.0;
    }
    lo = std::log10(lo);
    hi = std::log10(hi);
  }
  std::vector<double> x(static_cast<std::size_t>(m_points) + 1);
  const double step = (hi - lo) / m_points;
  for (int i = 0; i <= m_points; ++i) {
    double v = lo + step * i;
    if (log_mode) {
      v = std::pow(10.0, v);
      if (shifted) v -= 1.0;
    }
    x[static_cast<std::size_t>(i)] = knots.clamp(v);
  }
  x.front() = knots.front();
  x.back() = knots.back();
  return x;
}

PlotSeries plot_series(const LiquidPart& liquid, std::span<const double> traditional_weights,
                       std::span<const double> liquid_coeffs, int m_points) {
  PlotSeries ps;
  ps.log_axis = liquid.log_axis;
  ps.x_liquid = axis_points(liquid.log_axis, m_points, liquid.knots);
  ps.y_liquid.reserve(ps.x_liquid.size());
  for (double x : ps.x_liquid) {
    ps.y_liquid.push_back(splines::spline_eval(x, liquid_coeffs, liquid.knots, liquid.order));
  }
  if (!traditional_weights.empty()) {
    ps.x_step = axis_points(liquid.log_axis, m_points, liquid.knots);
    ps.y_step.reserve(ps.x_step.size());
    for (double x : ps.x_step) {
      ps.y_step.push_back(step_eval(x, traditional_weights, liquid.knots));
    }
  }
  return ps;
}

std::vector<double> liquid_coefficients(const CoefficientLayout& layout, int characteristic,
                                        const Eigen::VectorXd& coeffs) {
  const CharacteristicColumns& cols =
      layout.per_characteristic.at(static_cast<std::size_t>(characteristic));
  if (cols.basis_begin < 0) return {};
  if (coeffs.size() != layout.size()) {
    throw_invalid("plot", "coefficient vector length does not match the layout");
  }
  return {coeffs.data() + cols.basis_begin, coeffs.data() + cols.basis_begin + cols.basis_size};
}

std::vector<NamedPlotSeries> plot_all(const ScorecardSpec& spec, const CoefficientLayout& layout,
                                      const Eigen::VectorXd& coeffs, int m_points) {
  std::vector<NamedPlotSeries> out;
  for (std::size_t ci = 0; ci < spec.characteristics.size(); ++ci) {
    const CharacteristicSpec& c = spec.characteristics[ci];
    if (!c.liquid) continue;
    const std::vector<double> lc = liquid_coefficients(layout, static_cast<int>(ci), coeffs);
    out.push_back({c.name, plot_series(*c.liquid, c.liquid->traditional_weights, lc, m_points)});
  }
  return out;
}

}  // namespace liquid::scorecard
