#include "io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bwlab::cli {

namespace {

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos)
      return out;
    start = comma + 1;
  }
}

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what)
{
  throw InvalidArgument("line " + std::to_string(line_no) + ": " + what);
}

} // namespace

std::optional<double> parse_double(std::string_view token)
{
  token = trim(token);
  if (token.empty())
    return std::nullopt;
  if (token.front() == '+')
    token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

std::string fmt(double x)
{
  if (std::isnan(x))
    return "nan";
  // shortest representation that round-trips
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<double> read_values(std::istream& in, const std::optional<std::string>& column)
{
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  bool first = true;
  std::optional<std::size_t> index;
  if (column) {
    if (auto k = parse_double(*column); k && *k >= 1.0 && std::floor(*k) == *k)
      index = static_cast<std::size_t>(*k) - 1;
  }

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty())
      continue;
    if (!column) {
      const auto v = parse_double(line);
      if (!v)
        bad_line(line_no, "not a finite number: '" + std::string(line) + "'");
      values.push_back(*v);
      continue;
    }
    const auto fields = split_csv(line);
    if (first) {
      first = false;
      bool header = false;
      for (auto f : fields)
        header = header || !parse_double(f);
      if (header) {
        if (!index) {
          for (std::size_t k = 0; k < fields.size(); ++k)
            if (fields[k] == *column)
              index = k;
          if (!index)
            bad_line(line_no, "no column named '" + *column + "' in header");
        }
        continue;
      }
      if (!index)
        bad_line(line_no, "column '" + *column + "' given by name but the file has no header");
    }
    if (*index >= fields.size())
      bad_line(line_no, "missing column " + std::to_string(*index + 1));
    const auto v = parse_double(fields[*index]);
    if (!v)
      bad_line(line_no, "not a finite number: '" + std::string(fields[*index]) + "'");
    values.push_back(*v);
  }
  if (values.empty())
    throw InvalidArgument("no data values found");
  return values;
}

std::vector<double> read_values_file(const std::string& path, const std::optional<std::string>& column)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("cannot open input file '" + path + "'");
  try {
    return read_values(in, column);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

NormalMixture parse_mixture_spec(const std::string& text, bool renormalize)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("mixture spec: ") + e.what());
  }
  if (!doc.is_object())
    throw InvalidArgument("mixture spec: expected an object with weights, means, sds");
  for (const auto& [key, _] : doc.items()) {
    if (key != "weights" && key != "means" && key != "sds")
      throw InvalidArgument("mixture spec: unknown key '" + key + "'");
  }
  auto array = [&](const char* key) {
    if (!doc.contains(key))
      throw InvalidArgument(std::string("mixture spec: missing key '") + key + "'");
    const auto& a = doc.at(key);
    if (!a.is_array() || a.empty())
      throw InvalidArgument(std::string("mixture spec: '") + key + "' must be a non-empty array");
    std::vector<double> out;
    for (const auto& v : a) {
      if (!v.is_number())
        throw InvalidArgument(std::string("mixture spec: '") + key + "' holds a non-number");
      out.push_back(v.get<double>());
    }
    return out;
  };
  const auto w = array("weights");
  const auto mu = array("means");
  const auto sd = array("sds");
  if (w.size() != mu.size() || w.size() != sd.size())
    throw InvalidArgument("mixture spec: weights, means and sds differ in length");
  std::vector<MixtureComponent> comps;
  for (std::size_t k = 0; k < w.size(); ++k)
    comps.push_back({ w[k], mu[k], sd[k] });
  return NormalMixture(std::move(comps), renormalize);
}

NormalMixture read_mixture_file(const std::string& path, bool renormalize)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidArgument("cannot open mixture file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mixture_spec(ss.str(), renormalize);
}

} // namespace bwlab::cli
