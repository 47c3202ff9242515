#include "contagion/topology.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "contagion/error.hpp"
#include "contagion/format.hpp"

namespace contagion {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::NoInterbankMarket: return "no-interbank-market";
    case ErrorKind::InfeasibleBalance: return "infeasible-balance";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

const char* to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Homogeneous: return "homogeneous";
    case TopologyKind::Heterogeneous: return "heterogeneous";
    case TopologyKind::External: return "external";
  }
  return "unknown";
}

Topology::Topology(std::size_t n, std::vector<Edge> edges, TopologyKind kind)
    : n_(n), edges_(std::move(edges)), kind_(kind) {
  for (const Edge& e : edges_) {
    if (e.creditor >= n_ || e.debtor >= n_) {
      fail(ErrorKind::InvalidParameter,
           "edge (" + std::to_string(e.creditor) + "," +
               std::to_string(e.debtor) + ") out of range for N=" +
               std::to_string(n_));
    }
    if (e.creditor == e.debtor) {
      fail(ErrorKind::InvalidParameter,
           "self-loop at bank " + std::to_string(e.creditor));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool Topology::has_edge(BankIndex creditor, BankIndex debtor) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{creditor, debtor});
}

double DegreeStats::mean_out() const {
  if (out_degree.empty()) return 0.0;
  return static_cast<double>(std::accumulate(out_degree.begin(), out_degree.end(), std::uint64_t{0})) /
         static_cast<double>(out_degree.size());
}

double DegreeStats::mean_in() const {
  if (in_degree.empty()) return 0.0;
  return static_cast<double>(std::accumulate(in_degree.begin(), in_degree.end(), std::uint64_t{0})) /
         static_cast<double>(in_degree.size());
}

DegreeStats degree_stats(const Topology& topology) {
  const std::size_t n = topology.size();
  DegreeStats stats;
  stats.out_degree.assign(n, 0);
  stats.in_degree.assign(n, 0);
  for (const Edge& e : topology.edges()) {
    ++stats.out_degree[e.creditor];
    ++stats.in_degree[e.debtor];
  }
  if (n >= 2) {
    stats.density = static_cast<double>(topology.edge_count()) /
                    (static_cast<double>(n) * static_cast<double>(n - 1));
  }
  return stats;
}

void write_edge_list(std::ostream& out, const Topology& topology) {
  out << "N " << topology.size() << '\n';
  for (const Edge& e : topology.edges()) {
    out << e.creditor << ' ' << e.debtor << '\n';
  }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& msg) {
  fail(ErrorKind::Parse, "edge list line " + std::to_string(line_no) + ": " + msg);
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Topology read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || line[line.find_first_not_of(" \t")] == '#') continue;
    std::istringstream fields(line);
    if (!have_header) {
      std::string tag;
      long long value = -1;
      if (!(fields >> tag >> value) || tag != "N" || value < 0) {
        parse_fail(line_no, "expected header 'N <n>'");
      }
      std::string rest;
      if (fields >> rest) parse_fail(line_no, "trailing text after header");
      n = static_cast<std::size_t>(value);
      have_header = true;
      continue;
    }
    long long i = -1;
    long long j = -1;
    if (!(fields >> i >> j)) parse_fail(line_no, "expected '<creditor> <debtor>'");
    std::string rest;
    if (fields >> rest) parse_fail(line_no, "trailing text after edge");
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n ||
        static_cast<std::size_t>(j) >= n) {
      parse_fail(line_no, "bank index out of range [0, " + std::to_string(n) + ")");
    }
    if (i == j) parse_fail(line_no, "self-loop");
    if (!seen.insert(static_cast<std::uint64_t>(i) * n + static_cast<std::uint64_t>(j)).second) {
      parse_fail(line_no, "duplicate edge");
    }
    edges.push_back({static_cast<BankIndex>(i), static_cast<BankIndex>(j)});
  }
  if (!have_header) fail(ErrorKind::Parse, "edge list: missing 'N <n>' header");
  return Topology(n, std::move(edges), TopologyKind::External);
}

Topology read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open topology file '" + path + "'");
  return read_edge_list(in);
}

}  // namespace contagion
