#include "hkreg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "hkreg/error.hpp"

namespace hkreg {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_dataset_csv(std::ostream& out, const Manifold& m, const Dataset& data) {
  out << "t";
  for (std::size_t c = 1; c <= m.coordinate_count(); ++c) out << ",coord" << c;
  out << '\n';
  for (const auto& obs : data.observations) {
    out << format_double(obs.t);
    for (double v : m.coordinates(obs.x)) out << ',' << format_double(v);
    out << '\n';
  }
}

namespace {

double parse_number(const std::string& field, std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) +
                                      ": not a number: '" + field + "'");
  }
  return value;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const Manifold& m) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Parse, "dataset CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string expected = "t";
  for (std::size_t c = 1; c <= m.coordinate_count(); ++c) {
    expected += ",coord" + std::to_string(c);
  }
  if (line != expected) {
    throw Error(ErrorCode::Parse, "dataset header '" + line +
                                      "' does not match '" + expected + "'");
  }
  Dataset data{m.kind(), {}};
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(parse_number(field, number));
    if (fields.size() != m.coordinate_count() + 1) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(number) +
                                        ": wrong number of columns");
    }
    const double t = fields.front();
    fields.erase(fields.begin());
    data.observations.push_back({t, m.from_coordinates(fields)});
  }
  data.validate();
  return data;
}

void save_dataset(const std::string& path, const Manifold& m, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_dataset_csv(out, m, data);
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

Dataset load_dataset(const std::string& path, const Manifold& m) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  return read_dataset_csv(in, m);
}

}  // namespace hkreg
