#pragma once

#include <iosfwd>
#include <string>

#include "liquid/scorecard.hpp"

// JSON scorecard specification. Coefficient references are either 1-based
// raw indices or {"characteristic": name, "label": attribute} objects;
// basis coefficients carry the labels "B1".."Bq". Unknown keys are rejected.
namespace liquid::io {

scorecard::ScorecardSpec parse_spec(const std::string& json_text,
                                    const std::string& source = "<spec>");
scorecard::ScorecardSpec read_spec_file(const std::string& path);

}  // namespace liquid::io
