#pragma once

#include <cstddef>

#include "contagion/rng.hpp"
#include "contagion/topology.hpp"

namespace contagion {

/// Homogeneous network: each of the N(N-1) ordered pairs is an edge
/// independently with probability p.
Topology gen_erdos_renyi(std::size_t n, double p, Rng& rng);
Topology gen_erdos_renyi(std::size_t n, double p, const RngStream& stream);

/// Tuning of the growth process behind gen_preferential_attachment.
struct AttachmentOptions {
  /// Attachment weight of a vertex with degree k is k - shift * k_min, where
  /// k_min = max(1, floor(m_mean)) is the smallest arrival degree. shift = 0
  /// is classic linear preference (degree exponent 3); shift -> 1 drives the
  /// exponent towards 2. Must lie in [0, 1).
  double shift = 0.95;

  /// How each undirected attachment edge becomes credit relations.
  enum class Orientation {
    Reciprocal,  // both (u, v) and (v, u)
    Random,      // one direction, fair coin
    NewLends,    // arriving vertex is the creditor
    NewBorrows,  // arriving vertex is the debtor
  };
  Orientation orientation = Orientation::Reciprocal;
};

/// Heterogeneous network: undirected growth with preferential attachment,
/// then every undirected edge {u, v} becomes both (u, v) and (v, u).
///
/// Each arriving vertex links to m existing vertices, m drawn from
/// {floor(m_mean), ceil(m_mean)} so that E[m] = m_mean = p (n - 1) / 2. The
/// growth starts from a clique on max(2, ceil(m_mean) + 1) vertices. p = 1
/// yields the complete directed graph.
Topology gen_preferential_attachment(std::size_t n, double p, Rng& rng,
                                     const AttachmentOptions& options = {});
Topology gen_preferential_attachment(std::size_t n, double p, const RngStream& stream,
                                     const AttachmentOptions& options = {});

}  // namespace contagion
