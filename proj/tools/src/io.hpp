#pragma once

#include "bwlab/mixtures.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bwlab::cli {

//! Reads numeric data: one value per line, or with `column` set, one CSV
//! field per line selected by header name or 1-based index. In CSV mode a
//! first line with any non-numeric field is taken as the header. Blank
//! lines are skipped; anything else that is not a finite number throws
//! InvalidArgument naming the line.
std::vector<double> read_values(std::istream& in, const std::optional<std::string>& column);
std::vector<double> read_values_file(const std::string& path, const std::optional<std::string>& column);

//! Parses a mixture spec {"weights": [...], "means": [...], "sds": [...]}.
//! Unknown keys, missing keys, non-numeric entries and length mismatches
//! are rejected.
NormalMixture parse_mixture_spec(const std::string& text, bool renormalize);
NormalMixture read_mixture_file(const std::string& path, bool renormalize);

//! Strict full-token parse of a finite double.
std::optional<double> parse_double(std::string_view token);

//! Shortest round-trip decimal form; "nan" for NaN.
std::string fmt(double x);

} // namespace bwlab::cli
