#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "fracp/geometry.hpp"

namespace fracp {

// Reports keep key order as written so reruns are byte-identical.
using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Shortest representation that round-trips a double exactly.
std::string fmt_double(double v);

// value + tolerance + verdict triple used for every checked numeric.
Json checked_value(double value, double tol, bool pass);

Json point_json(Point x, int dim);

// Parses a JSON file; parse failures surface byte offsets in the message.
Json load_json_file(const std::string& path);

// Write-to-temporary then rename, so readers never observe partial files.
void write_text_atomic(const std::string& path, const std::string& text);

// Stamps schema_version at the top and writes atomically.
void write_json_report(const std::string& path, Json report);

// Header row plus data rows, LF line endings.
std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace fracp
