#pragma once

#include <iosfwd>
#include <string>

#include "ecproc/point_set.hpp"

namespace ecproc {

/// Shortest round-trip decimal representation ("inf", "-inf", "nan" for
/// non-finite values). Locale independent.
std::string format_double(double x);

/// One point per row, d comma-separated columns, no header.
void write_points_csv(std::ostream& out, const PointSet& points);
PointSet read_points_csv(std::istream& in);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ecproc
