#include "contagion/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

namespace contagion {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& msg) {
  fail(ErrorKind::InvalidParameter, field + ": " + msg);
}

}  // namespace

void validate_config(const ScenarioConfig& c) {
  if (c.topology_kind != TopologyKind::External && c.n < 2) invalid("n", "must be >= 2");
  if (c.topology_kind == TopologyKind::Heterogeneous && c.n < 3) {
    invalid("n", "heterogeneous networks need n >= 3");
  }
  if (c.topology_kind == TopologyKind::External && c.topology_file.empty()) {
    invalid("topology_file", "required for external topology");
  }
  if (c.topology_kind != TopologyKind::External && !(c.p >= 0.0 && c.p <= 1.0)) {
    invalid("p", "must lie in [0, 1]");
  }
  if (!(c.q > 0.0 && c.q < 0.5)) {
    invalid("Q", "value " + format_double(c.q) + " outside the bound (0, 0.5)");
  }
  if (!(c.s >= 0.0)) invalid("s", "must be >= 0");
  if (!(c.t >= 0.0)) invalid("t", "must be >= 0");
  if (!(c.total_external > 0.0) || !std::isfinite(c.total_external)) invalid("E", "must be positive");
  if (c.r_grid.empty()) invalid("r_grid", "must contain at least one R");
  for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
    if (!(c.r_grid[i] > 0.0 && c.r_grid[i] < 1.0)) invalid("r_grid", "every R must lie in (0, 1)");
    if (i > 0 && !(c.r_grid[i] > c.r_grid[i - 1])) invalid("r_grid", "must be strictly increasing");
  }
  if (c.replications < 1) invalid("replications", "must be >= 1");
  if (!(c.attachment.shift >= 0.0 && c.attachment.shift < 1.0)) {
    invalid("attachment_shift", "must lie in [0, 1)");
  }
  if (c.surcharge) {
    if (!(c.surcharge->ratio >= 0.0)) invalid("surcharge.R_s", "must be >= 0");
    if (!(c.surcharge->biggest_fraction >= 0.0 && c.surcharge->biggest_fraction <= 1.0)) {
      invalid("surcharge.biggest_fraction", "must lie in [0, 1]");
    }
    if (!(c.r_grid.back() + c.surcharge->ratio < 1.0)) {
      invalid("surcharge.R_s", "R + R_s must stay below 1 for every R in r_grid");
    }
  }
}

ReplicationError::ReplicationError(const Error& cause, std::uint64_t stream_index)
    : Error(cause.kind(), "replication " + std::to_string(stream_index) + ": " + cause.what()),
      stream_index_(stream_index) {}

Scenario::Scenario(ScenarioConfig config) : config_(std::move(config)) {
  validate_config(config_);
  if (config_.topology_kind == TopologyKind::External) {
    external_ = std::make_shared<const Topology>(read_edge_list_file(config_.topology_file));
    config_.n = external_->size();
  }
}

ReplicationDraw Scenario::draw(std::uint64_t stream_index) const {
  try {
    Rng rng = RngStream{config_.master_seed, stream_index}.make();
    ReplicationDraw d;
    switch (config_.topology_kind) {
      case TopologyKind::Homogeneous:
        d.topology = std::make_shared<const Topology>(gen_erdos_renyi(config_.n, config_.p, rng));
        break;
      case TopologyKind::Heterogeneous:
        d.topology = std::make_shared<const Topology>(
            gen_preferential_attachment(config_.n, config_.p, rng, config_.attachment));
        break;
      case TopologyKind::External:
        d.topology = external_;
        break;
    }
    d.weights = compute_weights(*d.topology, config_.s, config_.t, config_.q, config_.total_external);
    d.initial_bank = static_cast<BankIndex>(rng.below(d.topology->size()));
    return d;
  } catch (const Error& e) {
    throw ReplicationError(e, stream_index);
  }
}

std::size_t Scenario::defaults_at(const ReplicationDraw& draw, double r, CascadeRunner& runner,
                                  BalanceSheetSet& scratch) const {
  build_balance_sheets_into(draw.weights, config_.q, r, config_.total_external, scratch);
  if (config_.surcharge) {
    apply_surcharge_in_place(scratch, config_.surcharge->ratio, config_.surcharge->biggest_fraction);
  }
  return runner.count_defaults(scratch, draw.weights, draw.initial_bank, config_.loss_rule);
}

std::size_t run_replication(const ScenarioConfig& config, double r, std::uint64_t stream_index) {
  const Scenario scenario(config);
  const ReplicationDraw d = scenario.draw(stream_index);
  CascadeRunner runner;
  BalanceSheetSet scratch;
  try {
    return scenario.defaults_at(d, r, runner, scratch);
  } catch (const Error& e) {
    throw ReplicationError(e, stream_index);
  }
}

SweepRecord summarize(double r, std::span<const std::uint32_t> samples) {
  if (samples.empty()) fail(ErrorKind::InvalidParameter, "summary of an empty sample");
  SweepRecord rec;
  rec.r = r;
  const auto count = static_cast<double>(samples.size());
  double sum = 0.0;
  std::size_t knock_on = 0;
  for (std::uint32_t x : samples) {
    sum += x;
    if (x >= 2) ++knock_on;
  }
  rec.mean = sum / count;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (std::uint32_t x : samples) ss += (x - rec.mean) * (x - rec.mean);
    rec.std = std::sqrt(ss / (count - 1.0));
  }
  rec.mean_plus_std = rec.mean + rec.std;
  std::vector<std::uint32_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::span<const std::uint32_t> view(sorted);
  rec.p90 = percentile(view, 0.90);
  rec.p95 = percentile(view, 0.95);
  rec.p99 = percentile(view, 0.99);
  rec.max = sorted.back();
  rec.knock_on_fraction = static_cast<double>(knock_on) / count;
  return rec;
}

SweepResult sweep(const ScenarioConfig& config, const SweepOptions& options) {
  const Scenario scenario(config);
  const auto& cfg = scenario.config();
  const std::size_t reps = cfg.replications;
  const std::size_t grid = cfg.r_grid.size();

  std::vector<std::vector<std::uint32_t>> samples(grid, std::vector<std::uint32_t>(reps, 0));
  std::vector<double> density(reps, 0.0);
  std::vector<std::vector<double>> runtime;  // per worker, per R

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::uint64_t error_index = UINT64_MAX;

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, reps));
  runtime.assign(workers, std::vector<double>(grid, 0.0));

  auto work = [&](std::size_t worker) {
    CascadeRunner runner;
    BalanceSheetSet scratch;
    for (;;) {
      const std::size_t rep = next.fetch_add(1, std::memory_order_relaxed);
      if (rep >= reps || stop.load(std::memory_order_relaxed)) return;
      try {
        const ReplicationDraw d = scenario.draw(rep);
        density[rep] = degree_stats(*d.topology).density;
        for (std::size_t k = 0; k < grid; ++k) {
          const auto start = std::chrono::steady_clock::now();
          try {
            samples[k][rep] = static_cast<std::uint32_t>(
                scenario.defaults_at(d, cfg.r_grid[k], runner, scratch));
          } catch (const ReplicationError&) {
            throw;
          } catch (const Error& e) {
            throw ReplicationError(e, rep);
          }
          runtime[worker][k] +=
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Report the lowest failing index so the message does not depend on scheduling.
        if (rep < error_index) {
          error_index = rep;
          error = std::current_exception();
        }
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  if (error) std::rethrow_exception(error);

  SweepResult result;
  result.config = cfg;
  result.records.reserve(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    result.records.push_back(summarize(cfg.r_grid[k], samples[k]));
  }
  result.realized_density_mean =
      std::accumulate(density.begin(), density.end(), 0.0) / static_cast<double>(reps);
  result.r_runtime_seconds.assign(grid, 0.0);
  for (const auto& per_worker : runtime) {
    for (std::size_t k = 0; k < grid; ++k) result.r_runtime_seconds[k] += per_worker[k];
  }
  if (options.keep_samples) result.samples = std::move(samples);
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "R,mean,std,mean_plus_std,p90,p95,p99,max,knock_on_fraction\n";
  for (const SweepRecord& r : result.records) {
    out << format_double(r.r) << ',' << format_double(r.mean) << ',' << format_double(r.std) << ','
        << format_double(r.mean_plus_std) << ',' << r.p90 << ',' << r.p95 << ',' << r.p99 << ','
        << r.max << ',' << format_double(r.knock_on_fraction) << '\n';
  }
}

void write_samples_csv(std::ostream& out, const SweepResult& result) {
  out << "R,stream_index,N_d\n";
  for (std::size_t k = 0; k < result.samples.size(); ++k) {
    const std::string r = format_double(result.records[k].r);
    for (std::size_t i = 0; i < result.samples[k].size(); ++i) {
      out << r << ',' << i << ',' << result.samples[k][i] << '\n';
    }
  }
}

}  // namespace contagion
