#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contagion/balance.hpp"
#include "contagion/cascade.hpp"
#include "contagion/error.hpp"
#include "contagion/format.hpp"
#include "contagion/netgen.hpp"
#include "contagion/topology.hpp"

namespace contagion {

struct SurchargePolicy {
  double ratio = 0.0;             // R_s
  double biggest_fraction = 0.0;  // share of banks receiving it

  friend bool operator==(const SurchargePolicy&, const SurchargePolicy&) = default;
};

enum class InitialBankPolicy { UniformRandom };

struct ScenarioConfig {
  std::size_t n = 500;
  TopologyKind topology_kind = TopologyKind::Homogeneous;
  std::string topology_file;  // external kind only
  double p = 0.005;
  double q = 0.1;
  double s = 0.0;
  double t = 0.0;
  double total_external = 1.0;
  std::vector<double> r_grid;
  std::size_t replications = 10000;
  std::uint64_t master_seed = 0;
  LossRule loss_rule = LossRule::PaperMax;
  std::optional<SurchargePolicy> surcharge;
  InitialBankPolicy initial_bank_policy = InitialBankPolicy::UniformRandom;
  AttachmentOptions attachment;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.n == b.n && a.topology_kind == b.topology_kind &&
           a.topology_file == b.topology_file && a.p == b.p && a.q == b.q && a.s == b.s &&
           a.t == b.t && a.total_external == b.total_external && a.r_grid == b.r_grid &&
           a.replications == b.replications && a.master_seed == b.master_seed &&
           a.loss_rule == b.loss_rule && a.surcharge == b.surcharge &&
           a.initial_bank_policy == b.initial_bank_policy &&
           a.attachment.shift == b.attachment.shift;
  }
};

/// Throws Error(InvalidParameter) naming the offending field.
void validate_config(const ScenarioConfig& config);

/// An Error raised inside one replication, tagged with its stream index.
class ReplicationError : public Error {
 public:
  ReplicationError(const Error& cause, std::uint64_t stream_index);
  std::uint64_t stream_index() const noexcept { return stream_index_; }

 private:
  std::uint64_t stream_index_;
};

/// Network and shocked bank of one replication; shared by every R in the grid.
struct ReplicationDraw {
  std::shared_ptr<const Topology> topology;
  WeightMatrix weights;
  BankIndex initial_bank = 0;
};

/// Prepared scenario: validates the config and loads an external topology once.
class Scenario {
 public:
  explicit Scenario(ScenarioConfig config);

  const ScenarioConfig& config() const noexcept { return config_; }

  /// Draws the topology, then the initial bank, from the replication's stream.
  ReplicationDraw draw(std::uint64_t stream_index) const;

  /// N_d for one R on an already drawn replication.
  std::size_t defaults_at(const ReplicationDraw& draw, double r, CascadeRunner& runner,
                          BalanceSheetSet& scratch) const;

 private:
  ScenarioConfig config_;
  std::shared_ptr<const Topology> external_;
};

/// Generates the replication's network and returns N_d at ratio R.
std::size_t run_replication(const ScenarioConfig& config, double r, std::uint64_t stream_index);

struct SweepRecord {
  double r = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double mean_plus_std = 0.0;
  std::uint32_t p90 = 0;
  std::uint32_t p95 = 0;
  std::uint32_t p99 = 0;
  std::uint32_t max = 0;
  double knock_on_fraction = 0.0;  // share of replications with N_d >= 2
};

struct SweepOptions {
  std::size_t workers = 1;
  bool keep_samples = false;
};

struct SweepResult {
  ScenarioConfig config;
  std::vector<SweepRecord> records;
  /// samples[r_index][stream_index]; empty unless SweepOptions::keep_samples.
  std::vector<std::vector<std::uint32_t>> samples;
  double realized_density_mean = 0.0;
  /// Cascade wall time per R summed over workers, in seconds.
  std::vector<double> r_runtime_seconds;
};

SweepResult sweep(const ScenarioConfig& config, const SweepOptions& options = {});

SweepRecord summarize(double r, std::span<const std::uint32_t> samples);

/// Nearest-rank percentile: the ceil(q n)-th smallest of n sorted samples.
template <class T>
T percentile(std::span<const T> sorted, double q) {
  if (sorted.empty()) fail(ErrorKind::InvalidParameter, "percentile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) fail(ErrorKind::InvalidParameter, "quantile must lie in (0, 1]");
  const double scaled = q * static_cast<double>(sorted.size());
  double rank = std::ceil(scaled);
  // q n lands a hair above an integer for decimal q such as 0.9 or 0.99.
  if (const double near = std::round(scaled); std::abs(scaled - near) <= 1e-9 * scaled) rank = near;
  const auto index = static_cast<std::size_t>(std::max(rank, 1.0)) - 1;
  return sorted[std::min(index, sorted.size() - 1)];
}

/// Header `R,mean,std,mean_plus_std,p90,p95,p99,max,knock_on_fraction`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// Header `R,stream_index,N_d`.
void write_samples_csv(std::ostream& out, const SweepResult& result);

}  // namespace contagion
