#include "contagion/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "contagion/error.hpp"

namespace contagion {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t to_unsigned(std::string_view text) {
  text = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a non-negative integer: '" + std::string(text) + "'");
  }
  return value;
}

// Grid points from a range are rounded to 12 significant digits so that
// 0.01 + 5 * 0.01 reads back as 0.06.
double tidy(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

TopologyKind parse_kind(std::string_view text) {
  if (text == "homogeneous") return TopologyKind::Homogeneous;
  if (text == "heterogeneous") return TopologyKind::Heterogeneous;
  if (text == "external") return TopologyKind::External;
  throw std::invalid_argument("unknown topology '" + std::string(text) +
                              "' (expected homogeneous, heterogeneous or external)");
}

}  // namespace

std::vector<double> parse_r_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos) throw std::invalid_argument("range must be start:stop:step");
    const double start = to_double(text.substr(0, a));
    const double stop = to_double(text.substr(a + 1, b - a - 1));
    const double step = to_double(text.substr(b + 1));
    if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
    if (stop < start) throw std::invalid_argument("range stop below start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) grid.push_back(tidy(start + static_cast<double>(k) * step));
    return grid;
  }
  std::string_view rest = text;
  if (!rest.empty() && rest.front() == '[' && rest.back() == ']') rest = rest.substr(1, rest.size() - 2);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    grid.push_back(to_double(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return grid;
}

ScenarioConfig parse_config_text(std::string_view text, const std::string& origin) {
  ScenarioConfig cfg;
  bool saw_s = false;
  bool saw_t = false;
  std::string section;
  std::set<std::string> seen;
  SurchargePolicy surcharge;
  bool has_surcharge = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const auto where = [&] { return origin + ":" + std::to_string(line_no) + ": "; };
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Parse, where() + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "surcharge") fail(ErrorKind::Parse, where() + "unknown section [" + section + "]");
      has_surcharge = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Parse, where() + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::Parse, where() + "missing key");
    const std::string qualified = section.empty() ? key : section + "." + key;
    if (!seen.insert(qualified).second) fail(ErrorKind::Parse, where() + "duplicate key '" + qualified + "'");

    try {
      if (section == "surcharge") {
        if (key == "R_s") surcharge.ratio = to_double(value);
        else if (key == "biggest_fraction") surcharge.biggest_fraction = to_double(value);
        else fail(ErrorKind::Parse, where() + "unknown key '" + qualified + "'");
      } else if (key == "n") {
        cfg.n = to_unsigned(value);
      } else if (key == "topology") {
        cfg.topology_kind = parse_kind(value);
      } else if (key == "topology_file") {
        cfg.topology_file = std::string(value);
      } else if (key == "p") {
        cfg.p = to_double(value);
      } else if (key == "Q") {
        cfg.q = to_double(value);
      } else if (key == "s") {
        cfg.s = to_double(value);
        saw_s = true;
      } else if (key == "t") {
        cfg.t = to_double(value);
        saw_t = true;
      } else if (key == "E") {
        cfg.total_external = to_double(value);
      } else if (key == "r_grid") {
        cfg.r_grid = parse_r_grid(value);
      } else if (key == "replications") {
        cfg.replications = to_unsigned(value);
      } else if (key == "seed") {
        cfg.master_seed = to_unsigned(value);
      } else if (key == "loss_rule") {
        cfg.loss_rule = parse_loss_rule(value);
      } else if (key == "initial_bank") {
        if (value != "uniform_random") {
          throw std::invalid_argument("unknown initial_bank policy '" + std::string(value) + "'");
        }
      } else if (key == "attachment_shift") {
        cfg.attachment.shift = to_double(value);
      } else {
        fail(ErrorKind::Parse, where() + "unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) throw;
      fail(ErrorKind::Parse, where() + key + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      fail(ErrorKind::Parse, where() + key + ": " + e.what());
    }
  }

  // Heterogeneous networks default to degree-weighted loans.
  if (cfg.topology_kind == TopologyKind::Heterogeneous) {
    if (!saw_s) cfg.s = 2.0;
    if (!saw_t) cfg.t = 2.0;
  }
  if (has_surcharge) cfg.surcharge = surcharge;
  for (const char* required : {"topology", "Q", "r_grid", "seed"}) {
    if (!seen.count(required)) {
      fail(ErrorKind::InvalidParameter, std::string(required) + ": missing required key");
    }
  }
  if (cfg.topology_kind != TopologyKind::External) {
    for (const char* required : {"n", "p"}) {
      if (!seen.count(required)) {
        fail(ErrorKind::InvalidParameter, std::string(required) + ": missing required key");
      }
    }
  }
  validate_config(cfg);
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string emit_config(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "n = " << c.n << '\n';
  out << "topology = " << to_string(c.topology_kind) << '\n';
  if (!c.topology_file.empty()) out << "topology_file = " << c.topology_file << '\n';
  out << "p = " << format_double(c.p) << '\n';
  out << "Q = " << format_double(c.q) << '\n';
  out << "s = " << format_double(c.s) << '\n';
  out << "t = " << format_double(c.t) << '\n';
  out << "E = " << format_double(c.total_external) << '\n';
  out << "r_grid = ";
  for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
    out << (i ? ", " : "") << format_double(c.r_grid[i]);
  }
  out << '\n';
  out << "replications = " << c.replications << '\n';
  out << "seed = " << c.master_seed << '\n';
  out << "loss_rule = " << to_string(c.loss_rule) << '\n';
  out << "initial_bank = uniform_random\n";
  out << "attachment_shift = " << format_double(c.attachment.shift) << '\n';
  if (c.surcharge) {
    out << "\n[surcharge]\n";
    out << "R_s = " << format_double(c.surcharge->ratio) << '\n';
    out << "biggest_fraction = " << format_double(c.surcharge->biggest_fraction) << '\n';
  }
  return out.str();
}

}  // namespace contagion
