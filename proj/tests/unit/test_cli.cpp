#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "liquid/csv.hpp"
#include "liquid_cli/commands.hpp"

namespace fs = std::filesystem;
using liquid::cli::run;

namespace {

const std::string kDocs = LIQUID_DOCS_DIR;
const std::string kSpec = kDocs + "/examples/scorecard.json";
const std::string kConfig = kDocs + "/examples/synthetic.json";

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("liquidsc_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + ": ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 2));
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"fit", "--spec", kSpec}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("basis tables") {
  auto r = call({"basis", "--knots", "0,1,2,3,4,5", "--order", "2", "--points", "11"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto t = liquid::io::read_table(in);
  CHECK(t.header == std::vector<std::string>{"x", "B1", "B2", "B3", "B4", "B5", "B6"});
  CHECK(t.rows() == 11);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double s = 0.0;
    for (std::size_t c = 1; c < t.cols(); ++c) s += t.columns[c][i];
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  r = call({"basis", "--knots", "0,1,2,3,4,5", "--order", "4", "--points", "5"});
  REQUIRE(r.code == 0);
  std::istringstream in4(r.out);
  CHECK(liquid::io::read_table(in4).cols() == 9);
  CHECK(call({"basis", "--knots", "0,2,1"}).code == 2);
  CHECK(call({"basis", "--knots", "0,a"}).code == 2);
  CHECK(call({"basis", "--knots", "0,1", "--order", "5"}).code == 2);
}

TEST_CASE("gen is reproducible") {
  TempDir tmp;
  REQUIRE(call({"gen", "--seed-config", kConfig, "--out", tmp / "a.csv"}).code == 0);
  REQUIRE(call({"gen", "--seed-config", kConfig, "--out", tmp / "b.csv"}).code == 0);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  write(tmp / "bad.json", R"({"seed": 1})");
  CHECK(call({"gen", "--seed-config", tmp / "bad.json"}).code == 2);
}

TEST_CASE("gen with balanced classes") {
  TempDir tmp;
  write(tmp / "half.json", R"({"seed": 3, "n_records": 10000, "class_balance": 0.5,
    "characteristics": [{"name": "x", "distribution": {"type": "normal", "mean": 0, "sd": 1},
      "truth": {"type": "step", "knots": [-5, 0, 5], "weights": [-1, 1]}}]})");
  const auto r = call({"gen", "--seed-config", tmp / "half.json"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto t = liquid::io::read_table(in);
  double mean = 0.0;
  for (double v : t.column("good")) mean += v;
  mean /= static_cast<double>(t.rows());
  CHECK(mean >= 0.45);
  CHECK(mean <= 0.55);
}

TEST_CASE("fit, validate and plot end to end") {
  TempDir tmp;
  REQUIRE(call({"gen", "--seed-config", kConfig, "--out", tmp / "data.csv"}).code == 0);
  const auto fit = call({"fit", "--spec", kSpec, "--data", tmp / "data.csv", "--out", tmp / "fit"});
  INFO(fit.err);
  REQUIRE(fit.code == 0);
  CHECK(fs::exists(tmp / "fit/coefficients.csv"));
  CHECK(fs::exists(tmp / "fit/plot_days_since_payment.csv"));

  const auto report = nlohmann::json::parse(slurp(tmp / "fit/report.json"));
  CHECK(report["qp"]["status"] == "OPTIMAL");
  CHECK(report["dev_divergence"].get<double>() > 0.0);
  CHECK(report["residuals"]["max"].get<double>() <= 1e-8);
  CHECK(report["kkt"]["passes"].get<bool>());
  CHECK(report["n_dev"].get<int>() + report["n_val"].get<int>() == 10000);

  const auto val = call({"validate", "--spec", kSpec, "--data", tmp / "data.csv", "--coeffs",
                         tmp / "fit/coefficients.csv", "--json"});
  REQUIRE(val.code == 0);
  const auto vj = nlohmann::json::parse(val.out);
  CHECK(std::abs(vj["dev_divergence"].get<double>() - report["dev_divergence"].get<double>()) <= 1e-12);
  CHECK(std::abs(vj["val_divergence"].get<double>() - report["val_divergence"].get<double>()) <= 1e-12);

  // Doubling every coefficient leaves the divergence unchanged.
  auto rows = liquid::io::read_coefficients_file(tmp / "fit/coefficients.csv");
  {
    std::ofstream f(tmp / "double.csv");
    f << "index,characteristic,label,raw,woe\n";
    for (const auto& r : rows)
      f << r.index << "," << liquid::io::quote_csv_field(r.characteristic) << ","
        << liquid::io::quote_csv_field(r.label) << "," << liquid::io::format_number(2 * r.raw) << ","
        << liquid::io::format_number(2 * r.woe) << "\n";
  }
  const auto val2 = call({"validate", "--spec", kSpec, "--data", tmp / "data.csv", "--coeffs", tmp / "double.csv"});
  REQUIRE(val2.code == 0);
  CHECK(std::abs(field(val2.out, "dev_divergence") - vj["dev_divergence"].get<double>()) <= 1e-12);

  // A truncated coefficient file no longer matches the spec.
  {
    std::ofstream f(tmp / "short.csv");
    f << "index,characteristic,label,raw,woe\n1,tenure,lt12,0,0\n";
  }
  CHECK(call({"validate", "--spec", kSpec, "--data", tmp / "data.csv", "--coeffs", tmp / "short.csv"}).code == 2);

  const auto plot = call({"plot", "--spec", kSpec, "--coeffs", tmp / "fit/coefficients.csv", "--out", tmp / "plots"});
  REQUIRE(plot.code == 0);
  std::ifstream pf(tmp / "plots/plot_days_since_payment.csv");
  const auto pt = liquid::io::read_table(pf);
  CHECK(pt.header == std::vector<std::string>{"x_step", "y_step", "x_liquid", "y_liquid"});
  CHECK(pt.rows() == 101);
}

TEST_CASE("plot without liquid characteristics warns and does nothing") {
  TempDir tmp;
  write(tmp / "spec.json", R"({"characteristics": [{"name": "x", "bins": [
      {"low": null, "high": 0, "label": "neg"}, {"low": 0, "high": null, "label": "pos"}]}]})");
  write(tmp / "coeffs.csv", "index,characteristic,label,raw,woe\n1,x,neg,0,0\n2,x,pos,1,1\n");
  const auto r = call({"plot", "--spec", tmp / "spec.json", "--coeffs", tmp / "coeffs.csv", "--out", tmp / "plots"});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp / "plots"));
}

TEST_CASE("fit failure modes map onto exit codes") {
  TempDir tmp;
  REQUIRE(call({"gen", "--seed-config", kConfig, "--out", tmp / "data.csv"}).code == 0);
  write(tmp / "empty.csv", "");
  CHECK(call({"fit", "--spec", kSpec, "--data", tmp / "empty.csv", "--out", tmp / "o"}).code == 2);
  write(tmp / "bad.json", "{\"characteristics\": [], \"bogus\": true}");
  CHECK(call({"fit", "--spec", tmp / "bad.json", "--data", tmp / "data.csv", "--out", tmp / "o"}).code == 2);

  const std::string two_bins = R"({"characteristics": [{"name": "region", "bins": [
      {"low": null, "high": 2, "label": "a"}, {"low": 2, "high": null, "label": "b"}]}],
    "constraints": {"inweights": [{"ref": 1, "value": 1}, {"ref": 2, "value": 1}]}})";
  write(tmp / "infeasible.json", two_bins);
  CHECK(call({"fit", "--spec", tmp / "infeasible.json", "--data", tmp / "data.csv", "--out", tmp / "o"}).code == 3);

  // S1 <= S2 and S1 >= S2 together only allow equality; still solvable.
  write(tmp / "tight.json", R"({"characteristics": [{"name": "region", "bins": [
      {"low": null, "high": 2, "label": "a"}, {"low": 2, "high": 3, "label": "b"},
      {"low": 3, "high": null, "label": "c"}]}],
    "constraints": {"patterns": [{"left": 1, "right": 2, "direction": "<"},
                                 {"left": 1, "right": 2, "direction": ">"}]}})");
  REQUIRE(call({"fit", "--spec", tmp / "tight.json", "--data", tmp / "data.csv", "--out", tmp / "t"}).code == 0);
  const auto rows = liquid::io::read_coefficients_file(tmp / "t/coefficients.csv");
  CHECK(std::abs(rows[0].raw - rows[1].raw) <= 1e-9);

  write(tmp / "capped.json", R"({"characteristics": [{"name": "tenure", "bins": [
      {"low": null, "high": 12, "label": "a"}, {"low": 12, "high": 36, "label": "b"},
      {"low": 36, "high": 60, "label": "c"}, {"low": 60, "high": null, "label": "d"}]}],
    "constraints": {"patterns": [{"left": 1, "right": 2, "direction": "<"},
                                 {"left": 2, "right": 3, "direction": "<"},
                                 {"left": 3, "right": 4, "direction": "<"}]},
    "fit": {"max_iter": 1}})");
  CHECK(call({"fit", "--spec", tmp / "capped.json", "--data", tmp / "data.csv", "--out", tmp / "c"}).code == 4);
}

TEST_CASE("the installed binary honours the exit-code contract") {
  TempDir tmp;
  const std::string bin = LIQUIDSC_PATH;
  const auto sh = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " >" + (tmp / "stdout") + " 2>" + (tmp / "stderr")).c_str());
    return WEXITSTATUS(status);
  };
  CHECK(sh("basis --knots 0,1,2,3,4,5 --order 1 --points 3") == 0);
  CHECK(slurp(tmp / "stdout").rfind("x,B1,B2,B3,B4,B5\n", 0) == 0);
  CHECK(sh("basis --knots 3,2") == 2);
  CHECK_FALSE(slurp(tmp / "stderr").empty());
  CHECK(sh("") == 2);
}
