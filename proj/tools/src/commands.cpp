#include "liquid_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "liquid/csv.hpp"
#include "liquid/error.hpp"
#include "liquid/scorecard.hpp"
#include "liquid/spec_file.hpp"
#include "liquid/splines.hpp"
#include "liquid/synthetic.hpp"

namespace liquid::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw_invalid("output", "cannot write '" + path.string() + "'");
  return f;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw_invalid("output", "cannot create directory '" + dir + "'");
}

// Keeps plot file names portable.
std::string file_stem(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) c = '_';
  }
  return s;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

void write_plots(const std::vector<scorecard::NamedPlotSeries>& plots, const std::string& dir,
                 std::ostream& log) {
  for (const auto& p : plots) {
    const fs::path path = fs::path(dir) / ("plot_" + file_stem(p.characteristic) + ".csv");
    auto f = open_output(path);
    io::write_plot_series(f, p.series);
    log << "wrote " << path.string() << "\n";
  }
}

// Coefficient vectors from a coefficient file, checked against the spec's layout.
struct LoadedCoefficients {
  Eigen::VectorXd raw;
  Eigen::VectorXd woe;
};

LoadedCoefficients load_coefficients(const std::string& path,
                                     const scorecard::CoefficientLayout& layout) {
  const auto rows = io::read_coefficients_file(path);
  if (static_cast<int>(rows.size()) != layout.size()) {
    throw_invalid("coefficients", "'" + path + "' has " + std::to_string(rows.size()) +
                                      " coefficients but the spec defines " +
                                      std::to_string(layout.size()));
  }
  LoadedCoefficients c{Eigen::VectorXd(layout.size()), Eigen::VectorXd(layout.size())};
  for (int i = 0; i < layout.size(); ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    const auto& col = layout.columns[static_cast<std::size_t>(i)];
    if (r.characteristic != col.characteristic_name || r.label != col.label) {
      throw_invalid("coefficients", "row " + std::to_string(i + 1) + " of '" + path +
                                        "' is " + r.characteristic + "/" + r.label +
                                        " but the spec expects " + col.characteristic_name +
                                        "/" + col.label);
    }
    c.raw(i) = r.raw;
    c.woe(i) = r.woe;
  }
  return c;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw_invalid("arguments", what + " has an empty entry");
    const std::string t = item.substr(b, e - b + 1);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
      throw_invalid("arguments", what + ": '" + t + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kInvalidInput: return kExitInvalid;
    case ErrorKind::kInfeasible: return kExitInfeasible;
    case ErrorKind::kNumerical: return kExitNumerical;
  }
  return kExitNumerical;
}

}  // namespace

void cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& log) {
  const auto spec = io::read_spec_file(args.spec);
  const auto data = io::read_table_file(args.data);
  log << "fitting " << data.rows() << " records\n";
  const auto r = scorecard::fit(spec, data);
  ensure_directory(args.out);

  {
    auto f = open_output(fs::path(args.out) / "coefficients.csv");
    io::write_coefficients(f, r.layout, r.coeffs_raw, r.coeffs_woe);
  }

  ordered_json report;
  report["p"] = r.layout.size();
  report["n_dev"] = r.n_dev;
  report["n_val"] = r.n_val;
  report["beta"] = r.beta;
  report["dev_divergence"] = r.dev_divergence;
  report["val_divergence"] = optional_number(r.val_divergence);
  report["qp"] = {{"status", qp::to_string(r.qp.status)},
                  {"iterations", r.qp.iterations},
                  {"phase1_iterations", r.qp.phase1_iterations},
                  {"objective", r.qp.objective},
                  {"started_from_supplied_point", r.qp.started_from_supplied_point}};
  report["kkt"] = {{"equality_residual", r.kkt.equality_residual},
                   {"inequality_residual", r.kkt.inequality_residual},
                   {"stationarity", r.kkt.stationarity},
                   {"complementarity", r.kkt.complementarity},
                   {"dual_infeasibility", r.kkt.dual_infeasibility},
                   {"active_inequalities", r.kkt.active_inequalities.size()},
                   {"passes", r.kkt.passes()}};
  report["residuals"] = {{"divergence", r.residuals.divergence},
                         {"inweight", r.residuals.inweight},
                         {"cross", r.residuals.cross},
                         {"centering", r.residuals.centering},
                         {"pattern", r.residuals.pattern},
                         {"max", r.residuals.max()}};
  {
    auto f = open_output(fs::path(args.out) / "report.json");
    f << report.dump(2) << "\n";
  }
  write_plots(r.plots, args.out, log);

  out << "status: " << qp::to_string(r.qp.status) << "\n";
  out << "beta: " << io::format_number(r.beta) << "\n";
  out << "dev_divergence: " << io::format_number(r.dev_divergence) << "\n";
  out << "val_divergence: " << (r.val_divergence ? io::format_number(*r.val_divergence) : "null")
      << "\n";
}

void cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& /*log*/) {
  const auto spec = io::read_spec_file(args.spec);
  const auto data = io::read_table_file(args.data);
  const auto dm = scorecard::build_design_matrix(spec, data);
  const auto coeffs = load_coefficients(args.coeffs, dm.layout);
  const auto y = scorecard::read_labels(spec, data);
  const auto parts = scorecard::split(data, spec.split);

  const auto divergence = [&](const std::vector<int>& rows) -> std::optional<double> {
    const auto yy = scorecard::select_labels(y, rows);
    const auto goods = std::count(yy.begin(), yy.end(), 1);
    if (goods < 2 || static_cast<long>(yy.size()) - goods < 2) return std::nullopt;
    return divstats::score_divergence(coeffs.woe, scorecard::select_rows(dm.values, rows), yy);
  };
  const auto dev = divergence(parts.dev);
  if (!dev) throw_invalid("validate", "each class needs at least 2 development records");
  const auto val = divergence(parts.val);

  if (args.json) {
    ordered_json j;
    j["n_dev"] = parts.dev.size();
    j["n_val"] = parts.val.size();
    j["dev_divergence"] = *dev;
    j["val_divergence"] = optional_number(val);
    out << j.dump(2) << "\n";
  } else {
    out << "dev_divergence: " << io::format_number(*dev) << "\n";
    out << "val_divergence: " << (val ? io::format_number(*val) : "null") << "\n";
  }
}

void cmd_plot(const PlotArgs& args, std::ostream& /*out*/, std::ostream& log) {
  const auto spec = io::read_spec_file(args.spec);
  const auto layout = scorecard::coefficient_layout(spec);
  const auto coeffs = load_coefficients(args.coeffs, layout);
  const auto plots = scorecard::plot_all(spec, layout, coeffs.woe, args.points);
  if (plots.empty()) {
    log << "warning: the spec has no liquid characteristics; nothing to plot\n";
    return;
  }
  ensure_directory(args.out);
  write_plots(plots, args.out, log);
}

void cmd_basis(const BasisArgs& args, std::ostream& out, std::ostream& /*log*/) {
  const splines::KnotVector knots(parse_number_list(args.knots, "--knots"));
  if (args.points < 2) throw_invalid("arguments", "--points must be at least 2");
  std::vector<double> xs(static_cast<std::size_t>(args.points));
  for (int i = 0; i < args.points; ++i) {
    xs[static_cast<std::size_t>(i)] =
        knots.front() + (knots.back() - knots.front()) * i / (args.points - 1);
  }
  xs.back() = knots.back();
  const auto block = splines::basis_block(xs, knots, args.order);

  Table t;
  t.add_column("x", xs);
  for (int c = 0; c < block.columns(); ++c) {
    std::vector<double> col(xs.size());
    for (std::size_t r = 0; r < xs.size(); ++r) col[r] = block.values(static_cast<Eigen::Index>(r), c);
    t.add_column("B" + std::to_string(c + 1), std::move(col));
  }
  if (args.out.empty() || args.out == "-") {
    io::write_table(out, t);
  } else {
    auto f = open_output(args.out);
    io::write_table(f, t);
  }
}

void cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& log) {
  const auto config = synthetic::read_config_file(args.config);
  const auto d = synthetic::generate(config);
  log << "generated " << d.table.rows() << " records (intercept " << io::format_number(d.intercept)
      << ")\n";
  if (args.out.empty() || args.out == "-") {
    io::write_table(out, d.table);
  } else {
    auto f = open_output(args.out);
    io::write_table(f, d.table);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Liquid scorecard fitting and diagnostics", "liquidsc"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a scorecard and write coefficients, report and plots");
  fit_cmd->add_option("--spec", fit.spec, "Scorecard spec (JSON)")->required();
  fit_cmd->add_option("--data", fit.data, "Records (CSV)")->required();
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Divergence of a coefficient file on each split");
  val_cmd->add_option("--spec", val.spec, "Scorecard spec (JSON)")->required();
  val_cmd->add_option("--data", val.data, "Records (CSV)")->required();
  val_cmd->add_option("--coeffs", val.coeffs, "Coefficient file written by fit")->required();
  val_cmd->add_flag("--json", val.json, "Print JSON instead of text");

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Plot data for every liquid characteristic");
  plot_cmd->add_option("--spec", plot.spec, "Scorecard spec (JSON)")->required();
  plot_cmd->add_option("--coeffs", plot.coeffs, "Coefficient file written by fit")->required();
  plot_cmd->add_option("--out", plot.out, "Output directory")->required();
  plot_cmd->add_option("--points", plot.points, "Plot intervals per curve");

  BasisArgs basis;
  auto* basis_cmd = app.add_subcommand("basis", "Tabulate the B-spline basis of one order");
  basis_cmd->add_option("--knots", basis.knots, "Comma-separated increasing knots")->required();
  basis_cmd->add_option("--order", basis.order, "Spline order 1-4");
  basis_cmd->add_option("--points", basis.points, "Number of evaluation points");
  basis_cmd->add_option("--out", basis.out, "Output CSV (standard output when omitted)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded synthetic dataset");
  gen_cmd->add_option("--seed-config", gen.config, "Synthetic config (JSON)")->required();
  gen_cmd->add_option("--out", gen.out, "Output CSV (standard output when omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "liquidsc: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (*fit_cmd) cmd_fit(fit, out, err);
    else if (*val_cmd) cmd_validate(val, out, err);
    else if (*plot_cmd) cmd_plot(plot, out, err);
    else if (*basis_cmd) cmd_basis(basis, out, err);
    else if (*gen_cmd) cmd_gen(gen, out, err);
  } catch (const Error& e) {
    err << "liquidsc: error in " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "liquidsc: internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace liquid::cli
