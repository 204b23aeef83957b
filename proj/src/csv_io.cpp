#include "cmcausal/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmcausal/errors.hpp"

namespace cmcausal {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Row {
  std::optional<double> x, y;
  std::size_t fields = 0;
};

Row split(std::string_view line) {
  Row row;
  std::size_t comma = line.find(',');
  if (comma == std::string_view::npos) {
    row.fields = 1;
    return row;
  }
  std::string_view rest = line.substr(comma + 1);
  row.fields = rest.find(',') == std::string_view::npos ? 2 : 3;
  if (row.fields != 2) return row;
  row.x = parse_number(line.substr(0, comma));
  row.y = parse_number(rest);
  return row;
}

}  // namespace

BivariateSample read_sample_csv(std::istream& in, HeaderMode header) {
  std::vector<double> xs, ys;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (first) {
      first = false;
      if (lineno == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
      if (header == HeaderMode::present) continue;
      if (header == HeaderMode::detect) {
        Row r = split(view);
        if (!(r.x && r.y)) continue;
      }
    }
    Row r = split(view);
    if (r.fields != 2)
      throw InputError("line " + std::to_string(lineno) + ": expected 2 columns, found " +
                       (r.fields == 1 ? std::string("1") : std::string("more than 2")));
    if (!r.x || !r.y)
      throw InputError("line " + std::to_string(lineno) + ": non-numeric value in row '" + std::string(view) + "'");
    if (!std::isfinite(*r.x) || !std::isfinite(*r.y))
      throw InputError("line " + std::to_string(lineno) + ": non-finite value in row '" + std::string(view) + "'");
    xs.push_back(*r.x);
    ys.push_back(*r.y);
  }
  if (xs.size() < 2) throw InputError("CSV holds fewer than 2 data rows");
  try {
    return BivariateSample(xs, ys);
  } catch (const InputError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

BivariateSample read_sample_csv(const std::filesystem::path& path, HeaderMode header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_sample_csv(in, header);
}

void write_sample_csv(std::ostream& out, const BivariateSample& sample) {
  out << "x,y\n";
  char buf[64];
  for (Eigen::Index i = 0; i < sample.x().size(); ++i) {
    auto p = std::to_chars(buf, buf + sizeof buf, sample.x()[i]).ptr;
    *p++ = ',';
    p = std::to_chars(p, buf + sizeof buf, sample.y()[i]).ptr;
    *p++ = '\n';
    out.write(buf, p - buf);
  }
}

void write_sample_csv(const std::filesystem::path& path, const BivariateSample& sample) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_sample_csv(out, sample);
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace cmcausal
