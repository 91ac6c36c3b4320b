#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "mesoamp/multistage.hpp"
#include "mesoamp/powerfit.hpp"

namespace mesoamp {

/// Shortest representation that round-trips the double exactly.
[[nodiscard]] std::string format_double(double x);

/// Comma-joined row of round-trip-exact doubles.
[[nodiscard]] std::string csv_row(const std::vector<double>& values);

[[nodiscard]] nlohmann::json fit_to_json(const PowerFit& fit);
[[nodiscard]] PowerFit fit_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json plan_to_json(const MultistagePlan& plan,
                                          const std::string& fit_source);

void write_text_file(const std::string& path, const std::string& content);
[[nodiscard]] std::string read_text_file(const std::string& path);

}
