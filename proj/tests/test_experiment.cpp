#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "contagion/experiment.hpp"
#include "doctest.h"

using namespace contagion;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.n = 120;
  c.p = 0.03;
  c.q = 0.1;
  c.r_grid = {0.01, 0.02, 0.05, 0.1};
  c.replications = 60;
  c.master_seed = 99;
  return c;
}

std::string csv(const SweepResult& r) {
  std::ostringstream out;
  write_sweep_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("nearest-rank percentile") {
  const std::vector<int> a{1, 1, 1, 2, 3, 5, 9, 9, 10, 50};
  CHECK(percentile(std::span<const int>(a), 0.9) == 10);
  CHECK(percentile(std::span<const int>(a), 1.0) == 50);
  CHECK(percentile(std::span<const int>(a), 0.05) == 1);
  const std::vector<int> one{7};
  for (double q : {0.01, 0.5, 0.99, 1.0}) CHECK(percentile(std::span<const int>(one), q) == 7);
  std::vector<int> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1);
  CHECK(percentile(std::span<const int>(hundred), 0.99) == 99);
  CHECK(percentile(std::span<const int>(hundred), 0.95) == 95);
  CHECK(percentile(std::span<const int>(hundred), 0.905) == 91);
  const std::vector<int> empty;
  CHECK_THROWS_AS(percentile(std::span<const int>(empty), 0.5), Error);
  CHECK_THROWS_AS(percentile(std::span<const int>(one), 0.0), Error);
}

TEST_CASE("summaries") {
  const std::vector<std::uint32_t> x{1, 1, 2, 4};
  const SweepRecord r = summarize(0.03, x);
  CHECK(r.mean == doctest::Approx(2.0));
  CHECK(r.std == doctest::Approx(std::sqrt(6.0 / 3.0)));
  CHECK(r.mean_plus_std == doctest::Approx(2.0 + std::sqrt(2.0)));
  CHECK(r.max == 4);
  CHECK(r.knock_on_fraction == doctest::Approx(0.5));
  const std::vector<std::uint32_t> single{3};
  CHECK(summarize(0.1, single).std == 0.0);
}

TEST_CASE("config validation names the field") {
  ScenarioConfig c = small_config();
  c.q = 0.6;
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("Q"), Error);
  c = small_config();
  c.r_grid = {0.02, 0.01};
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("r_grid"), Error);
  c = small_config();
  c.replications = 0;
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("replications"), Error);
  c = small_config();
  c.surcharge = SurchargePolicy{0.95, 0.1};
  CHECK_THROWS_WITH_AS(validate_config(c), doctest::Contains("R_s"), Error);
}

TEST_CASE("replication is deterministic and reuses the draw across R") {
  const ScenarioConfig c = small_config();
  CHECK(run_replication(c, 0.02, 5) == run_replication(c, 0.02, 5));
  const Scenario scenario(c);
  const ReplicationDraw a = scenario.draw(11);
  const ReplicationDraw b = scenario.draw(11);
  CHECK(*a.topology == *b.topology);
  CHECK(a.initial_bank == b.initial_bank);
}

TEST_CASE("replication errors carry the stream index") {
  ScenarioConfig c = small_config();
  c.p = 0.0;
  try {
    run_replication(c, 0.05, 17);
    FAIL("expected an error");
  } catch (const ReplicationError& e) {
    CHECK(e.stream_index() == 17);
    CHECK(e.kind() == ErrorKind::NoInterbankMarket);
  }
  c.replications = 5;
  try {
    sweep(c, {.workers = 3});
    FAIL("expected an error");
  } catch (const ReplicationError& e) {
    CHECK(e.stream_index() == 0);
  }
}

TEST_CASE("external two-bank topology reproduces the hand trace") {
  const std::string path = (std::filesystem::temp_directory_path() / "experiment_two_bank.edges").string();
  {
    std::ofstream out(path);
    out << "N 2\n0 1\n";
  }
  ScenarioConfig c;
  c.topology_kind = TopologyKind::External;
  c.topology_file = path;
  c.q = 0.1;
  c.r_grid = {0.05};
  c.replications = 40;
  c.master_seed = 1;
  // N_d is 2 when bank 1 is struck and 1 when bank 0 is struck.
  const SweepResult r = sweep(c, {.keep_samples = true});
  const Scenario scenario(c);
  for (std::uint64_t i = 0; i < 40; ++i) {
    const std::uint32_t expected = scenario.draw(i).initial_bank == 1 ? 2 : 1;
    CHECK(r.samples[0][i] == expected);
  }
}

TEST_CASE("sweep statistics and invariants") {
  const SweepResult r = sweep(small_config(), {.workers = 2, .keep_samples = true});
  REQUIRE(r.records.size() == 4);
  REQUIRE(r.samples.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    const SweepRecord& rec = r.records[k];
    CHECK(r.samples[k].size() == 60);
    CHECK(rec.p90 <= rec.p95);
    CHECK(rec.p95 <= rec.p99);
    CHECK(rec.p99 <= rec.max);
    CHECK(rec.mean <= rec.max);
    CHECK(summarize(rec.r, r.samples[k]).mean == rec.mean);
    if (k > 0) {
      CHECK(rec.mean <= r.records[k - 1].mean);
      for (std::size_t i = 0; i < 60; ++i) CHECK(r.samples[k][i] <= r.samples[k - 1][i]);
    }
  }
  CHECK(r.realized_density_mean == doctest::Approx(0.03).epsilon(0.1));
}

TEST_CASE("degenerate sweep") {
  ScenarioConfig c = small_config();
  c.r_grid = {0.04};
  c.replications = 1;
  const SweepResult r = sweep(c);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].std == 0.0);
  const std::string text = csv(r);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.rfind("R,mean,std,mean_plus_std,p90,p95,p99,max,knock_on_fraction\n0.04,", 0) == 0);
}

TEST_CASE("sweep output does not depend on worker count") {
  ScenarioConfig c = small_config();
  c.topology_kind = TopologyKind::Heterogeneous;
  c.s = c.t = 2;
  c.surcharge = SurchargePolicy{0.025, 0.1};
  const std::string one = csv(sweep(c, {.workers = 1}));
  CHECK(csv(sweep(c, {.workers = 4})) == one);
  CHECK(csv(sweep(c, {.workers = 16})) == one);
}

TEST_CASE("surcharge never raises mean defaults on paired seeds") {
  ScenarioConfig base = small_config();
  base.replications = 100;
  ScenarioConfig charged = base;
  charged.surcharge = SurchargePolicy{0.025, 0.2};
  const SweepResult a = sweep(base, {.workers = 2, .keep_samples = true});
  const SweepResult b = sweep(charged, {.workers = 2, .keep_samples = true});
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(b.records[k].mean <= a.records[k].mean);
  }
}

TEST_CASE("raw sample dump") {
  ScenarioConfig c = small_config();
  c.replications = 3;
  c.r_grid = {0.05, 0.1};
  const SweepResult r = sweep(c, {.keep_samples = true});
  std::ostringstream out;
  write_samples_csv(out, r);
  const std::string text = out.str();
  CHECK(text.rfind("R,stream_index,N_d\n0.05,0,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}
