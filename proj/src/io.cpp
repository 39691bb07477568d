#include "dbw/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dbw {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) {
    return false;
  }
  const char* begin = s.data();
  if (*begin == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string lower(std::string s) {
  std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return in;
}

bool blank(const std::string& line) { return trim(line).empty(); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TimeSeries ingest_velocity_csv(const std::filesystem::path& path, double delta) {
  auto in = open(path);
  std::string line;
  while (std::getline(in, line) && blank(line)) {
  }
  const auto header = split(line);
  std::size_t iu = header.size();
  std::size_t iv = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = lower(header[i]);
    if (name == "u") {
      iu = i;
    } else if (name == "v") {
      iv = i;
    }
  }
  if (iu == header.size() || iv == header.size()) {
    throw std::runtime_error(path.string() + ": header must name columns u and v");
  }

  std::vector<cdouble> z;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (blank(line)) {
      continue;
    }
    ++row;
    const auto fields = split(line);
    double u = 0.0;
    double v = 0.0;
    if (fields.size() <= std::max(iu, iv) || !parse_number(fields[iu], u) || !parse_number(fields[iv], v)) {
      throw std::runtime_error(path.string() + ": data row " + std::to_string(row) + " is not numeric: " + line);
    }
    if (!std::isfinite(u) || !std::isfinite(v)) {
      throw std::runtime_error(path.string() + ": data row " + std::to_string(row) + " is not finite: " + line);
    }
    z.emplace_back(u, v);
  }
  if (z.size() < 16) {
    throw std::runtime_error(path.string() + ": need at least 16 rows, found " + std::to_string(z.size()));
  }
  return TimeSeries(std::move(z), delta);
}

void write_velocity_csv(const std::filesystem::path& path, const TimeSeries& z) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "u,v\n";
  for (const auto& v : z.values()) {
    out << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
  }
}

TimeSeries read_series_csv(const std::filesystem::path& path, double delta) {
  {
    auto in = open(path);
    std::string line;
    while (std::getline(in, line) && blank(line)) {
    }
    const auto header = split(line);
    const bool has_u = std::ranges::any_of(header, [](const auto& h) { return lower(h) == "u"; });
    const bool has_v = std::ranges::any_of(header, [](const auto& h) { return lower(h) == "v"; });
    if (has_u && has_v) {
      return ingest_velocity_csv(path, delta);
    }
  }
  auto in = open(path);
  std::string line;
  std::vector<double> x;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (blank(line)) {
      continue;
    }
    ++row;
    const auto fields = split(line);
    double v = 0.0;
    if (fields.empty() || !parse_number(fields[0], v)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + " is not numeric: " + line);
    }
    first = false;
    if (!std::isfinite(v)) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + " is not finite: " + line);
    }
    x.push_back(v);
  }
  if (x.size() < 2) {
    throw std::runtime_error(path.string() + ": need at least 2 values");
  }
  return TimeSeries(std::move(x), delta);
}

}  // namespace dbw
