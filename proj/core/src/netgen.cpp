#include "contagion/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "contagion/error.hpp"

namespace contagion {

namespace {

Topology complete_graph(std::size_t n, TopologyKind kind) {
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) edges.push_back({static_cast<BankIndex>(i), static_cast<BankIndex>(j)});
    }
  }
  return Topology(n, std::move(edges), kind);
}

}  // namespace

Topology gen_erdos_renyi(std::size_t n, double p, Rng& rng) {
  if (n < 2) fail(ErrorKind::InvalidParameter, "erdos-renyi: n must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "erdos-renyi: p must lie in [0, 1]");
  }
  if (p == 1.0) return complete_graph(n, TopologyKind::Homogeneous);

  std::vector<Edge> edges;
  if (p == 0.0) return Topology(n, std::move(edges), TopologyKind::Homogeneous);

  // Geometric skipping over the linearized ordered pairs: pair k maps to
  // creditor k / (n-1) and the (k % (n-1))-th other vertex.
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1);
  edges.reserve(static_cast<std::size_t>(static_cast<double>(pairs) * p * 1.1) + 16);
  const double log_q = std::log1p(-p);
  std::uint64_t k = 0;
  for (;;) {
    const double u = rng.uniform();
    const double skip = std::floor(std::log1p(-u) / log_q);
    if (skip >= static_cast<double>(pairs - k)) break;
    k += static_cast<std::uint64_t>(skip);
    const auto creditor = static_cast<BankIndex>(k / (n - 1));
    auto debtor = static_cast<BankIndex>(k % (n - 1));
    if (debtor >= creditor) ++debtor;
    edges.push_back({creditor, debtor});
    if (++k >= pairs) break;
  }
  return Topology(n, std::move(edges), TopologyKind::Homogeneous);
}

Topology gen_erdos_renyi(std::size_t n, double p, const RngStream& stream) {
  Rng rng = stream.make();
  return gen_erdos_renyi(n, p, rng);
}

Topology gen_preferential_attachment(std::size_t n, double p, Rng& rng,
                                     const AttachmentOptions& options) {
  if (n < 3) fail(ErrorKind::InvalidParameter, "preferential-attachment: n must be >= 3");
  if (!(p > 0.0 && p <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "preferential-attachment: p must lie in (0, 1]");
  }
  if (!(options.shift >= 0.0 && options.shift < 1.0)) {
    fail(ErrorKind::InvalidParameter, "preferential-attachment: shift must lie in [0, 1)");
  }
  const bool reciprocal = options.orientation == AttachmentOptions::Orientation::Reciprocal;
  const double m_mean = p * static_cast<double>(n - 1) / (reciprocal ? 2.0 : 1.0);
  if (m_mean < 0.5) {
    fail(ErrorKind::InvalidParameter,
         "preferential-attachment: density " + std::to_string(p) +
             " infeasible (mean attachment p(n-1)/2 = " + std::to_string(m_mean) +
             " < 0.5)");
  }
  if (p == 1.0) return complete_graph(n, TopologyKind::Heterogeneous);

  const auto m_low = static_cast<std::size_t>(std::floor(m_mean));
  const double m_frac = m_mean - static_cast<double>(m_low);
  const std::size_t seed_size =
      std::min(n, std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(m_mean)) + 1));
  const double offset = options.shift * static_cast<double>(std::max<std::size_t>(1, m_low));

  std::vector<std::uint32_t> degree(n, 0);
  // Every edge endpoint appears once, so a uniform draw is degree-proportional.
  std::vector<BankIndex> endpoints;
  std::vector<Edge> undirected;
  endpoints.reserve(static_cast<std::size_t>(2.0 * m_mean * static_cast<double>(n)) + 16);

  auto link = [&](BankIndex u, BankIndex v) {
    undirected.push_back({u, v});
    endpoints.push_back(u);
    endpoints.push_back(v);
    ++degree[u];
    ++degree[v];
  };

  for (std::size_t u = 0; u < seed_size; ++u) {
    for (std::size_t v = u + 1; v < seed_size; ++v) {
      link(static_cast<BankIndex>(u), static_cast<BankIndex>(v));
    }
  }

  std::vector<BankIndex> targets;
  for (std::size_t v = seed_size; v < n; ++v) {
    std::size_t m = m_low + (rng.uniform() < m_frac ? 1 : 0);
    m = std::min(m, v);
    targets.clear();
    while (targets.size() < m) {
      const BankIndex candidate = endpoints[rng.below(endpoints.size())];
      // Thin the degree-proportional draw down to weight k - offset.
      if (offset > 0.0) {
        const double k = degree[candidate];
        if (rng.uniform() * k >= k - offset) continue;
      }
      if (std::find(targets.begin(), targets.end(), candidate) != targets.end()) continue;
      targets.push_back(candidate);
    }
    for (BankIndex target : targets) link(static_cast<BankIndex>(v), target);
  }

  std::vector<Edge> directed;
  directed.reserve(2 * undirected.size());
  // Attachment edges are recorded as (newer, older) except inside the seed clique.
  for (const Edge& e : undirected) {
    switch (options.orientation) {
      case AttachmentOptions::Orientation::Reciprocal:
        directed.push_back({e.creditor, e.debtor});
        directed.push_back({e.debtor, e.creditor});
        break;
      case AttachmentOptions::Orientation::Random:
        if (rng.uniform() < 0.5) directed.push_back({e.creditor, e.debtor});
        else directed.push_back({e.debtor, e.creditor});
        break;
      case AttachmentOptions::Orientation::NewLends:
        directed.push_back({e.creditor, e.debtor});
        break;
      case AttachmentOptions::Orientation::NewBorrows:
        directed.push_back({e.debtor, e.creditor});
        break;
    }
  }
  return Topology(n, std::move(directed), TopologyKind::Heterogeneous);
}

Topology gen_preferential_attachment(std::size_t n, double p, const RngStream& stream,
                                     const AttachmentOptions& options) {
  Rng rng = stream.make();
  return gen_preferential_attachment(n, p, rng, options);
}

}  // namespace contagion
