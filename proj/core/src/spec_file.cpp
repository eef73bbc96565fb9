#include "liquid/spec_file.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "liquid/error.hpp"

namespace liquid::io {
namespace {

using nlohmann::json;
using scorecard::ScorecardSpec;

constexpr const char* kStage = "spec";

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

// null stands for an unbounded end.
double bound(const json& j, const std::string& path, double if_null) {
  return j.is_null() ? if_null : number(j, path);
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::string label_of(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return os.str();
  }
  fail(path, "expected a string label");
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

scorecard::CharacteristicSpec parse_characteristic(const json& j, const std::string& path) {
  expect_object(j, path, {"name", "column", "special_values", "bins", "liquid"});
  scorecard::CharacteristicSpec c;
  if (!j.contains("name")) fail(path, "missing 'name'");
  c.name = text(j["name"], path + ".name");
  c.source_column = j.contains("column") ? text(j["column"], path + ".column") : c.name;

  if (j.contains("special_values")) {
    const json& sv = j["special_values"];
    if (!sv.is_array()) fail(path + ".special_values", "expected an array");
    for (std::size_t i = 0; i < sv.size(); ++i) {
      const std::string p = path + ".special_values[" + std::to_string(i) + "]";
      expect_object(sv[i], p, {"value", "label"});
      if (!sv[i].contains("value")) fail(p, "missing 'value'");
      scorecard::SpecialValue s;
      s.value = number(sv[i]["value"], p + ".value");
      s.label = sv[i].contains("label") ? label_of(sv[i]["label"], p + ".label")
                                        : label_of(sv[i]["value"], p + ".value");
      c.special_values.push_back(std::move(s));
    }
  }
  if (j.contains("bins")) {
    const json& bins = j["bins"];
    if (!bins.is_array()) fail(path + ".bins", "expected an array");
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const std::string p = path + ".bins[" + std::to_string(i) + "]";
      expect_object(bins[i], p, {"low", "high", "label"});
      if (!bins[i].contains("low") || !bins[i].contains("high") || !bins[i].contains("label")) {
        fail(p, "bins need 'low', 'high' and 'label'");
      }
      c.discrete_bins.push_back({bound(bins[i]["low"], p + ".low", -inf),
                                 bound(bins[i]["high"], p + ".high", inf),
                                 label_of(bins[i]["label"], p + ".label")});
    }
  }
  if (j.contains("liquid")) {
    const std::string p = path + ".liquid";
    const json& lj = j["liquid"];
    expect_object(lj, p, {"knots", "order", "log_axis", "roughness_weight", "traditional_weights"});
    if (!lj.contains("knots")) fail(p, "missing 'knots'");
    scorecard::LiquidPart liquid;
    liquid.knots = splines::KnotVector(numbers(lj["knots"], p + ".knots"));
    if (lj.contains("order")) liquid.order = integer(lj["order"], p + ".order");
    if (lj.contains("log_axis")) {
      if (!lj["log_axis"].is_boolean()) fail(p + ".log_axis", "expected a boolean");
      liquid.log_axis = lj["log_axis"].get<bool>();
    }
    if (lj.contains("roughness_weight")) {
      liquid.roughness_weight = number(lj["roughness_weight"], p + ".roughness_weight");
    }
    if (lj.contains("traditional_weights")) {
      liquid.traditional_weights =
          numbers(lj["traditional_weights"], p + ".traditional_weights");
    }
    c.liquid = std::move(liquid);
  }
  return c;
}

class Resolver {
 public:
  explicit Resolver(const scorecard::CoefficientLayout& layout) : layout_(layout) {}

  int resolve(const json& ref, const std::string& path) const {
    if (ref.is_number_integer()) {
      const int idx = ref.get<int>();
      if (idx < 1 || idx > layout_.size()) {
        fail(path, "coefficient index " + std::to_string(idx) + " outside 1.." +
                       std::to_string(layout_.size()));
      }
      return idx - 1;
    }
    expect_object(ref, path, {"characteristic", "label"});
    if (!ref.contains("characteristic") || !ref.contains("label")) {
      fail(path, "reference needs 'characteristic' and 'label' (or a 1-based index)");
    }
    const std::string ch = text(ref["characteristic"], path + ".characteristic");
    const std::string label = label_of(ref["label"], path + ".label");
    const int idx = layout_.find(ch, label);
    if (idx < 0) fail(path, "no coefficient labelled '" + label + "' in '" + ch + "'");
    return idx;
  }

  const scorecard::CoefficientLayout& layout() const { return layout_; }

 private:
  const scorecard::CoefficientLayout& layout_;
};

engineering::Relation relation_of(const json& j, const std::string& path) {
  const std::string d = text(j, path);
  if (d == "<") return engineering::Relation::kLess;
  if (d == ">") return engineering::Relation::kGreater;
  fail(path, "direction must be \"<\" or \">\"");
}

void add_pattern(engineering::ConstraintSet& cs, int left, int right,
                 engineering::Relation rel, const std::string& path) {
  if (left == right) fail(path, "pattern compares a coefficient with itself");
  if (left > right) {
    std::swap(left, right);
    rel = rel == engineering::Relation::kLess ? engineering::Relation::kGreater
                                              : engineering::Relation::kLess;
  }
  cs.patterns.push_back({left, right, rel});
}

void parse_constraints(const json& j, const Resolver& res, engineering::ConstraintSet& cs) {
  const std::string path = "constraints";
  expect_object(j, path, {"inweights", "crosses", "centering_groups", "patterns"});

  if (j.contains("inweights")) {
    const json& iw = j["inweights"];
    if (!iw.is_array()) fail(path + ".inweights", "expected an array");
    for (std::size_t i = 0; i < iw.size(); ++i) {
      const std::string p = path + ".inweights[" + std::to_string(i) + "]";
      if (iw[i].is_object() && iw[i].contains("ref")) {
        expect_object(iw[i], p, {"ref", "value"});
        const double v = iw[i].contains("value") ? number(iw[i]["value"], p + ".value") : 0.0;
        cs.inweights.push_back({res.resolve(iw[i]["ref"], p + ".ref"), v});
      } else {
        cs.inweights.push_back({res.resolve(iw[i], p), 0.0});
      }
    }
  }
  if (j.contains("crosses")) {
    const json& cr = j["crosses"];
    if (!cr.is_array()) fail(path + ".crosses", "expected an array");
    for (std::size_t i = 0; i < cr.size(); ++i) {
      const std::string p = path + ".crosses[" + std::to_string(i) + "]";
      if (!cr[i].is_array() || cr[i].size() != 2) fail(p, "expected a pair of references");
      cs.crosses.push_back({res.resolve(cr[i][0], p + "[0]"), res.resolve(cr[i][1], p + "[1]")});
    }
  }
  if (j.contains("centering_groups")) {
    const json& cg = j["centering_groups"];
    const std::string p = path + ".centering_groups";
    if (cg.is_string()) {
      if (cg.get<std::string>() != "auto-per-characteristic") {
        fail(p, "expected \"auto-per-characteristic\" or an array of groups");
      }
      cs.centering_groups = res.layout().centering_groups();
    } else if (cg.is_array()) {
      for (std::size_t g = 0; g < cg.size(); ++g) {
        const std::string pg = p + "[" + std::to_string(g) + "]";
        if (!cg[g].is_array()) fail(pg, "expected an array of references");
        std::vector<int> group;
        for (std::size_t k = 0; k < cg[g].size(); ++k) {
          group.push_back(res.resolve(cg[g][k], pg + "[" + std::to_string(k) + "]"));
        }
        cs.centering_groups.push_back(std::move(group));
      }
    } else {
      fail(p, "expected \"auto-per-characteristic\" or an array of groups");
    }
  }
  if (j.contains("patterns")) {
    const json& pats = j["patterns"];
    if (!pats.is_array()) fail(path + ".patterns", "expected an array");
    for (std::size_t i = 0; i < pats.size(); ++i) {
      const std::string p = path + ".patterns[" + std::to_string(i) + "]";
      const json& pj = pats[i];
      if (!pj.is_object()) fail(p, "expected an object");
      if (!pj.contains("direction")) fail(p, "missing 'direction'");
      const engineering::Relation rel = relation_of(pj["direction"], p + ".direction");
      if (pj.contains("chain")) {
        // Adjacent pairs of an ordered list of references.
        expect_object(pj, p, {"chain", "direction"});
        const json& chain = pj["chain"];
        if (!chain.is_array() || chain.size() < 2) fail(p + ".chain", "needs 2+ references");
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
          add_pattern(cs, res.resolve(chain[k], p + ".chain[" + std::to_string(k) + "]"),
                      res.resolve(chain[k + 1], p + ".chain[" + std::to_string(k + 1) + "]"),
                      rel, p);
        }
      } else if (pj.contains("basis_range")) {
        // Adjacent basis coefficients B_from .. B_to of one characteristic.
        expect_object(pj, p, {"characteristic", "basis_range", "direction"});
        if (!pj.contains("characteristic")) fail(p, "missing 'characteristic'");
        const std::string ch = text(pj["characteristic"], p + ".characteristic");
        const json& range = pj["basis_range"];
        if (!range.is_array() || range.size() != 2) fail(p + ".basis_range", "expected [from, to]");
        const int from = integer(range[0], p + ".basis_range[0]");
        const int to = integer(range[1], p + ".basis_range[1]");
        if (from >= to) fail(p + ".basis_range", "needs from < to");
        for (int k = from; k < to; ++k) {
          const int a = res.layout().find(ch, "B" + std::to_string(k));
          const int b = res.layout().find(ch, "B" + std::to_string(k + 1));
          if (a < 0 || b < 0) fail(p, "basis index out of range for '" + ch + "'");
          add_pattern(cs, a, b, rel, p);
        }
      } else {
        expect_object(pj, p, {"left", "right", "direction"});
        if (!pj.contains("left") || !pj.contains("right")) fail(p, "missing 'left'/'right'");
        add_pattern(cs, res.resolve(pj["left"], p + ".left"), res.resolve(pj["right"], p + ".right"),
                    rel, p);
      }
    }
  }
}

void parse_fit(const json& j, ScorecardSpec& spec) {
  const std::string path = "fit";
  expect_object(j, path, {"delta", "lambda", "roughness_weight", "split", "label_column",
                          "layout", "max_iter"});
  if (j.contains("delta")) spec.constraints.delta = number(j["delta"], path + ".delta");
  if (j.contains("lambda")) spec.lambda = number(j["lambda"], path + ".lambda");
  if (j.contains("roughness_weight")) {
    spec.roughness_weight = number(j["roughness_weight"], path + ".roughness_weight");
  }
  if (j.contains("label_column")) spec.label_column = text(j["label_column"], path + ".label_column");
  if (j.contains("max_iter")) spec.qp_options.max_iter = integer(j["max_iter"], path + ".max_iter");
  if (j.contains("layout")) {
    const std::string l = text(j["layout"], path + ".layout");
    if (l == "sectioned") spec.layout = scorecard::Layout::kSectioned;
    else if (l == "grouped") spec.layout = scorecard::Layout::kGrouped;
    else fail(path + ".layout", "expected \"sectioned\" or \"grouped\"");
  }
  if (j.contains("split")) {
    const std::string p = path + ".split";
    expect_object(j["split"], p, {"column", "validation_values"});
    if (!j["split"].contains("column") || !j["split"].contains("validation_values")) {
      fail(p, "needs 'column' and 'validation_values'");
    }
    spec.split = scorecard::SplitRule{text(j["split"]["column"], p + ".column"),
                                      numbers(j["split"]["validation_values"],
                                              p + ".validation_values")};
  }
}

}  // namespace

ScorecardSpec parse_spec(const std::string& json_text, const std::string& source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw_invalid(kStage, source + ": " + e.what());
  }
  expect_object(root, source, {"characteristics", "constraints", "fit", "start_point"});
  if (!root.contains("characteristics") || !root["characteristics"].is_array()) {
    fail(source, "'characteristics' must be an array");
  }
  ScorecardSpec spec;
  const json& chars = root["characteristics"];
  for (std::size_t i = 0; i < chars.size(); ++i) {
    spec.characteristics.push_back(
        parse_characteristic(chars[i], "characteristics[" + std::to_string(i) + "]"));
  }
  // Fit options first: the layout choice determines coefficient numbering.
  if (root.contains("fit")) parse_fit(root["fit"], spec);

  const scorecard::CoefficientLayout layout = scorecard::coefficient_layout(spec);
  if (root.contains("constraints")) {
    parse_constraints(root["constraints"], Resolver(layout), spec.constraints);
  }
  if (root.contains("start_point")) {
    const std::vector<double> start = numbers(root["start_point"], "start_point");
    if (static_cast<int>(start.size()) != layout.size()) {
      fail("start_point", "has " + std::to_string(start.size()) + " entries, expected " +
                              std::to_string(layout.size()));
    }
    spec.start_point = Eigen::Map<const Eigen::VectorXd>(start.data(),
                                                         static_cast<Eigen::Index>(start.size()));
  }
  return spec;
}

ScorecardSpec read_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid(kStage, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str(), path);
}

}  // namespace liquid::io
