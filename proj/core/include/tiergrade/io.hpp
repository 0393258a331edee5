#pragma once

// Population file parsing and the fixed numeric formatting used by every
// CSV emitter.

#include <iosfwd>
#include <string>
#include <vector>

#include "tiergrade/design.hpp"

namespace tiergrade::io {

// 12-significant-digit decimal rendering; identical input yields identical text.
std::string fmt12(double x);

// Reads a population file: header `id,theta`, one student per row.
// Throws std::invalid_argument on malformed input.
std::vector<Student> read_population(std::istream& in);
std::vector<Student> read_population_file(const std::string& path);

std::string welfare_report_csv(const WelfareReport& report);

}  // namespace tiergrade::io
