// Text formats for the command line tool.
//
// Data file: CSV, one sample per line, y first then x. A first line that does
// not parse as numbers is treated as a header.
//
// Model file: key = value lines, '#' starts a comment.
//   noise_var = 1
//   theta0 = 1 2
//   sigma = 1 0.5      (one line per row)
//   sigma = 0.5 2
#pragma once

#include "advlin/core.hpp"

#include <iosfwd>
#include <string>

namespace advlin {

[[nodiscard]] Dataset read_dataset_csv(std::istream& in);
[[nodiscard]] Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

[[nodiscard]] ModelSpec read_model(std::istream& in);
[[nodiscard]] ModelSpec read_model(const std::string& path);
void write_model(std::ostream& out, const ModelSpec& model);

/// Numbers separated by whitespace, commas or newlines.
[[nodiscard]] Vector read_vector(std::istream& in);
[[nodiscard]] Vector read_vector(const std::string& path);

/// Shortest round-trippable decimal form of a double.
[[nodiscard]] std::string format_double(double v);

}  // namespace advlin
