#include "liquid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "liquid/error.hpp"
#include "liquid/splines.hpp"

namespace liquid::synthetic {
namespace {

using nlohmann::json;

constexpr const char* kStage = "synthetic";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw_invalid(kStage, path + ": " + what);
}

void expect_object(const json& j, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) fail(path, "unknown key '" + item.key() + "'");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double required(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path, std::string("missing '") + key + "'");
  return number(j[key], path + "." + key);
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Distribution parse_distribution(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    fail(path, "needs a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  Distribution d;
  if (type == "uniform" || type == "loguniform") {
    expect_object(j, path, {"type", "low", "high"});
    d.kind = type == "uniform" ? DistributionKind::kUniform : DistributionKind::kLogUniform;
    d.a = required(j, "low", path);
    d.b = required(j, "high", path);
    if (!(d.a < d.b)) fail(path, "needs low < high");
    if (d.kind == DistributionKind::kLogUniform && !(d.a > 0.0)) {
      fail(path, "loguniform needs low > 0");
    }
  } else if (type == "normal") {
    expect_object(j, path, {"type", "mean", "sd"});
    d.kind = DistributionKind::kNormal;
    d.a = required(j, "mean", path);
    d.b = required(j, "sd", path);
    if (!(d.b > 0.0)) fail(path, "needs sd > 0");
  } else if (type == "exponential") {
    expect_object(j, path, {"type", "scale"});
    d.kind = DistributionKind::kExponential;
    d.a = required(j, "scale", path);
    if (!(d.a > 0.0)) fail(path, "needs scale > 0");
  } else if (type == "choice") {
    expect_object(j, path, {"type", "values", "probs"});
    d.kind = DistributionKind::kChoice;
    if (!j.contains("values")) fail(path, "missing 'values'");
    d.values = numbers(j["values"], path + ".values");
    if (d.values.empty()) fail(path, "needs at least one value");
    d.probs = j.contains("probs") ? numbers(j["probs"], path + ".probs")
                                  : std::vector<double>(d.values.size(), 1.0);
    if (d.probs.size() != d.values.size()) fail(path, "values and probs differ in length");
    double total = 0.0;
    for (double p : d.probs) {
      if (!(p >= 0.0)) fail(path, "probs must be non-negative");
      total += p;
    }
    if (!(total > 0.0)) fail(path, "probs must not all be zero");
  } else {
    fail(path, "unknown distribution type '" + type + "'");
  }
  return d;
}

Truth parse_truth(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    fail(path, "needs a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  Truth t;
  if (type == "step") {
    expect_object(j, path, {"type", "knots", "weights"});
    t.kind = TruthKind::kStep;
    if (!j.contains("knots") || !j.contains("weights")) fail(path, "needs knots and weights");
    t.knots = numbers(j["knots"], path + ".knots");
    t.weights = numbers(j["weights"], path + ".weights");
    splines::KnotVector check(t.knots);
    if (t.weights.size() + 1 != t.knots.size()) fail(path, "needs one weight per interval");
  } else if (type == "spline") {
    expect_object(j, path, {"type", "knots", "order", "coeffs"});
    t.kind = TruthKind::kSpline;
    if (!j.contains("knots") || !j.contains("coeffs")) fail(path, "needs knots and coeffs");
    t.knots = numbers(j["knots"], path + ".knots");
    t.weights = numbers(j["coeffs"], path + ".coeffs");
    if (j.contains("order")) {
      if (!j["order"].is_number_integer()) fail(path + ".order", "expected an integer");
      t.order = j["order"].get<int>();
    }
    splines::KnotVector knots(t.knots);
    if (static_cast<int>(t.weights.size()) != splines::basis_count(knots.size(), t.order)) {
      fail(path, "coefficient count does not match knots and order");
    }
  } else if (type == "table") {
    expect_object(j, path, {"type", "values", "scores"});
    t.kind = TruthKind::kTable;
    if (!j.contains("values") || !j.contains("scores")) fail(path, "needs values and scores");
    t.values = numbers(j["values"], path + ".values");
    t.weights = numbers(j["scores"], path + ".scores");
    if (t.values.size() != t.weights.size()) fail(path, "values and scores differ in length");
  } else if (type == "zero") {
    expect_object(j, path, {"type"});
  } else {
    fail(path, "unknown truth type '" + type + "'");
  }
  return t;
}

// Portable draws: the engine is fully specified by the standard, the
// transforms below are ours so output does not depend on the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double draw(const Distribution& d, Rng& rng) {
  switch (d.kind) {
    case DistributionKind::kUniform: return d.a + (d.b - d.a) * rng.uniform();
    case DistributionKind::kLogUniform:
      return std::exp(std::log(d.a) + (std::log(d.b) - std::log(d.a)) * rng.uniform());
    case DistributionKind::kNormal: return d.a + d.b * rng.normal();
    case DistributionKind::kExponential: return -d.a * std::log(1.0 - rng.uniform());
    case DistributionKind::kChoice: return d.values[rng.categorical(d.probs)];
  }
  return 0.0;
}

double logistic(double s) { return 1.0 / (1.0 + std::exp(-s)); }

}  // namespace

SyntheticConfig parse_config(const std::string& json_text, const std::string& source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw_invalid(kStage, source + ": " + e.what());
  }
  expect_object(root, source, {"seed", "n_records", "class_balance", "intercept", "label_column",
                               "sample_column", "sample_values", "characteristics"});
  SyntheticConfig c;
  if (!root.contains("seed") || !root["seed"].is_number_unsigned()) {
    fail(source, "'seed' must be a non-negative integer");
  }
  c.seed = root["seed"].get<std::uint64_t>();
  if (!root.contains("n_records") || !root["n_records"].is_number_integer() ||
      root["n_records"].get<long long>() < 1) {
    fail(source, "'n_records' must be a positive integer");
  }
  c.n_records = root["n_records"].get<int>();
  if (root.contains("class_balance")) {
    const double b = number(root["class_balance"], "class_balance");
    if (!(b > 0.0 && b < 1.0)) fail("class_balance", "must lie in (0, 1)");
    c.class_balance = b;
  }
  if (root.contains("intercept")) c.intercept = number(root["intercept"], "intercept");
  if (root.contains("label_column")) {
    if (!root["label_column"].is_string()) fail("label_column", "expected a string");
    c.label_column = root["label_column"].get<std::string>();
  }
  if (root.contains("sample_column")) {
    if (!root["sample_column"].is_string()) fail("sample_column", "expected a string");
    c.sample_column = root["sample_column"].get<std::string>();
  }
  if (root.contains("sample_values")) {
    c.sample_values = numbers(root["sample_values"], "sample_values");
    if (c.sample_values.empty()) fail("sample_values", "must not be empty");
  }
  if (!root.contains("characteristics") || !root["characteristics"].is_array()) {
    fail(source, "'characteristics' must be an array");
  }
  std::set<std::string> names = {c.label_column, c.sample_column};
  if (c.label_column == c.sample_column) fail(source, "label and sample columns must differ");
  for (std::size_t i = 0; i < root["characteristics"].size(); ++i) {
    const json& cj = root["characteristics"][i];
    const std::string path = "characteristics[" + std::to_string(i) + "]";
    expect_object(cj, path, {"name", "distribution", "integer", "special_values", "truth"});
    CharacteristicConfig ch;
    if (!cj.contains("name") || !cj["name"].is_string()) fail(path, "needs a string 'name'");
    ch.name = cj["name"].get<std::string>();
    if (!names.insert(ch.name).second) fail(path, "duplicate column name '" + ch.name + "'");
    if (!cj.contains("distribution")) fail(path, "missing 'distribution'");
    ch.distribution = parse_distribution(cj["distribution"], path + ".distribution");
    if (cj.contains("integer")) {
      if (!cj["integer"].is_boolean()) fail(path + ".integer", "expected a boolean");
      ch.integer = cj["integer"].get<bool>();
    }
    if (cj.contains("special_values")) {
      const json& sv = cj["special_values"];
      if (!sv.is_array()) fail(path + ".special_values", "expected an array");
      double total = 0.0;
      for (std::size_t k = 0; k < sv.size(); ++k) {
        const std::string p = path + ".special_values[" + std::to_string(k) + "]";
        expect_object(sv[k], p, {"value", "probability", "score"});
        SpecialCode code{required(sv[k], "value", p), required(sv[k], "probability", p),
                         sv[k].contains("score") ? number(sv[k]["score"], p + ".score") : 0.0};
        if (!(code.probability >= 0.0)) fail(p, "probability must be non-negative");
        total += code.probability;
        ch.special_values.push_back(code);
      }
      if (total > 1.0) fail(path + ".special_values", "probabilities sum above 1");
    }
    if (cj.contains("truth")) ch.truth = parse_truth(cj["truth"], path + ".truth");
    c.characteristics.push_back(std::move(ch));
  }
  return c;
}

SyntheticConfig read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid(kStage, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

double true_score(const CharacteristicConfig& c, double value) {
  for (const SpecialCode& s : c.special_values) {
    if (value == s.value) return s.score;
  }
  const Truth& t = c.truth;
  switch (t.kind) {
    case TruthKind::kZero: return 0.0;
    case TruthKind::kStep: {
      const double x = std::clamp(value, t.knots.front(), t.knots.back());
      const std::size_t na = t.weights.size();
      for (std::size_t i = 0; i + 1 < na; ++i) {
        if (t.knots[i] <= x && x < t.knots[i + 1]) return t.weights[i];
      }
      return t.weights[na - 1];
    }
    case TruthKind::kSpline: {
      const splines::KnotVector knots(t.knots);
      return splines::spline_eval(knots.clamp(value), t.weights, knots, t.order);
    }
    case TruthKind::kTable:
      for (std::size_t i = 0; i < t.values.size(); ++i) {
        if (t.values[i] == value) return t.weights[i];
      }
      return 0.0;
  }
  return 0.0;
}

Dataset generate(const SyntheticConfig& config) {
  Rng rng(config.seed);
  const auto n = static_cast<std::size_t>(config.n_records);
  std::vector<std::vector<double>> values(config.characteristics.size(),
                                          std::vector<double>(n));
  std::vector<double> score(n, 0.0);
  std::vector<double> sample(n);
  std::vector<double> u_label(n);

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < config.characteristics.size(); ++c) {
      const CharacteristicConfig& ch = config.characteristics[c];
      double v = 0.0;
      bool special = false;
      double u = rng.uniform();
      for (const SpecialCode& s : ch.special_values) {
        if (u < s.probability) {
          v = s.value;
          special = true;
          break;
        }
        u -= s.probability;
      }
      if (!special) {
        v = draw(ch.distribution, rng);
        if (ch.integer) v = std::floor(v);
      }
      values[c][r] = v;
      score[r] += true_score(ch, v);
    }
    sample[r] = config.sample_values[rng.categorical(
        std::vector<double>(config.sample_values.size(), 1.0))];
    u_label[r] = rng.uniform();
  }

  Dataset ds;
  ds.intercept = config.intercept;
  if (config.class_balance) {
    // Mean probability is increasing in the intercept; bisect to the target.
    auto mean_p = [&](double b0) {
      double s = 0.0;
      for (double v : score) s += logistic(b0 + v);
      return s / static_cast<double>(n);
    };
    double lo = -50.0, hi = 50.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mean_p(mid) < *config.class_balance ? lo : hi) = mid;
    }
    ds.intercept = 0.5 * (lo + hi);
  }

  std::vector<double> labels(n);
  ds.probability.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    ds.probability[r] = logistic(ds.intercept + score[r]);
    labels[r] = u_label[r] < ds.probability[r] ? 1.0 : 0.0;
  }
  for (std::size_t c = 0; c < config.characteristics.size(); ++c) {
    ds.table.add_column(config.characteristics[c].name, std::move(values[c]));
  }
  ds.table.add_column(config.label_column, std::move(labels));
  ds.table.add_column(config.sample_column, std::move(sample));
  return ds;
}

}  // namespace liquid::synthetic
