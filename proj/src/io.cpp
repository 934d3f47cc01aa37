#include "fracp/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracp {

std::string fmt_double(double v) {
  char buf[40];
  // try increasing precision until the parse round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

Json checked_value(double value, double tol, bool pass) {
  Json j;
  j["value"] = value;
  j["tol"] = tol;
  j["pass"] = pass;
  return j;
}

Json point_json(Point x, int dim) {
  Json j = Json::array();
  j.push_back(x[0]);
  if (dim == 2) j.push_back(x[1]);
  return j;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("config parse failure in " + path + ": " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp);
    out << text;
    if (!out.flush()) throw std::runtime_error("write failure: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move report into place: " + path);
}

void write_json_report(const std::string& path, Json report) {
  Json stamped;
  stamped["schema_version"] = kSchemaVersion;
  for (auto& [key, value] : report.items())
    if (key != "schema_version") stamped[key] = std::move(value);
  write_text_atomic(path, stamped.dump(2) + "\n");
}

std::string make_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv row width disagrees with the header");
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << row[c];
    out << '\n';
  }
  return out.str();
}

}  // namespace fracp
