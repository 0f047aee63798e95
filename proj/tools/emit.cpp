#include "app.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace qb::app {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);  // shortest round-trip form
  return std::string(buf, r.ptr);
}

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "plotdata") return Format::Plotdata;
  fail(Errc::ConfigError, "format: expected json, csv or plotdata, got '" + s + "'");
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoError, "cannot open " + tmp);
    out << content;
    out.flush();
    if (!out) fail(Errc::IoError, "write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(Errc::IoError, "cannot rename " + tmp + " to " + path);
  }
}

std::vector<std::string> emit(const RunReport& r, Format f, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(Errc::IoError, "cannot create output directory " + dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    std::string path = (fs::path(dir) / name).string();
    write_atomic(path, content);
    written.push_back(path);
  };
  switch (f) {
    case Format::Json:
      put("report.json", r.to_json().dump(2) + "\n");
      break;
    case Format::Csv:
      for (const auto& t : r.tables) {
        std::string s;
        for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
        s += "\n";
        for (const auto& row : t.rows) {
          for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
          s += "\n";
        }
        put(t.name + ".csv", s);
      }
      break;
    case Format::Plotdata:
      for (const auto& sr : r.series) {
        std::string s = "# " + sr.x_label + " " + sr.y_label + "\n";
        for (std::size_t i = 0; i < sr.x.size(); ++i) s += format_double(sr.x[i]) + " " + format_double(sr.y[i]) + "\n";
        put(sr.name + ".dat", s);
      }
      break;
  }
  return written;
}

}  // namespace qb::app
