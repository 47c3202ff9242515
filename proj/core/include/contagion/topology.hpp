#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace contagion {

using BankIndex = std::uint32_t;

enum class TopologyKind { Homogeneous, Heterogeneous, External };

const char* to_string(TopologyKind kind);

/// Directed credit relation: `debtor` borrows from `creditor` (l_ij = 1 with
/// i = creditor, j = debtor).
struct Edge {
  BankIndex creditor;
  BankIndex debtor;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple directed graph of credit relations. Edges are kept sorted and
/// unique; self-loops are rejected on construction.
class Topology {
 public:
  Topology() = default;
  Topology(std::size_t n, std::vector<Edge> edges,
           TopologyKind kind = TopologyKind::External);

  std::size_t size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  TopologyKind kind() const noexcept { return kind_; }

  bool has_edge(BankIndex creditor, BankIndex debtor) const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  TopologyKind kind_ = TopologyKind::External;
};

struct DegreeStats {
  std::vector<std::uint32_t> out_degree;  // g_i: number of debtor banks
  std::vector<std::uint32_t> in_degree;   // c_i: number of creditor banks
  double density = 0.0;                   // |edges| / (N (N - 1))

  double mean_out() const;
  double mean_in() const;
};

DegreeStats degree_stats(const Topology& topology);

// Edge-list text format: "N <n>" on the first line, then one
// "<creditor> <debtor>" pair per line, 0-based.
void write_edge_list(std::ostream& out, const Topology& topology);
Topology read_edge_list(std::istream& in);
Topology read_edge_list_file(const std::string& path);

}  // namespace contagion
