#pragma once

#include <string>
#include <vector>

namespace screening {

// Numbers are rendered with %.12g so CSV output is compact, stable across
// runs, and round-trips doubles to well past the tolerances used anywhere.
std::string csv_num(double v);
std::string csv_join(const std::vector<std::string>& cells);

}  // namespace screening
