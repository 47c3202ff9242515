#include <cmath>
#include <sstream>

#include "contagion/balance.hpp"
#include "contagion/error.hpp"
#include "contagion/netgen.hpp"
#include "doctest.h"
#include "support/oracle.hpp"

using namespace contagion;

namespace {

Topology two_banks() { return Topology(2, {{0, 1}}); }

oracle::Network dense(const Topology& t) {
  oracle::Network net{t.size(), std::vector<std::vector<int>>(t.size(), std::vector<int>(t.size(), 0))};
  for (const Edge& e : t.edges()) net.link[e.creditor][e.debtor] = 1;
  return net;
}

}  // namespace

TEST_CASE("compute_weights hand examples") {
  SUBCASE("single edge carries all interbank lending") {
    const WeightMatrix w = compute_weights(two_banks(), 0, 0, 0.1, 1.8);
    CHECK(w.weight(0, 1) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(w.weight(1, 0) == 0.0);
    CHECK(w.loans()[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(w.borrowings()[1] == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("complete graph splits evenly") {
    Rng rng(0);
    const WeightMatrix w = compute_weights(gen_erdos_renyi(3, 1.0, rng), 0, 0, 0.1, 1.8);
    for (BankIndex i = 0; i < 3; ++i)
      for (BankIndex j = 0; j < 3; ++j)
        if (i != j) CHECK(w.weight(i, j) == doctest::Approx(0.2 / 6).epsilon(1e-14));
  }
  SUBCASE("equal in-degrees split evenly under t = 1") {
    const WeightMatrix w = compute_weights(Topology(3, {{0, 1}, {0, 2}}), 0, 1, 0.1, 1.8);
    CHECK(w.weight(0, 1) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(w.weight(0, 2) == doctest::Approx(0.1).epsilon(1e-14));
  }
}

TEST_CASE("compute_weights errors") {
  CHECK_THROWS_AS(compute_weights(Topology(4, {}), 0, 0, 0.1, 1.0), Error);
  try {
    compute_weights(Topology(4, {}), 0, 0, 0.1, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoInterbankMarket);
  }
  CHECK_THROWS_AS(compute_weights(two_banks(), 0, 0, 0.5, 1.0), Error);
  CHECK_THROWS_AS(compute_weights(two_banks(), 0, 0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(compute_weights(two_banks(), 0, 0, 0.1, 0.0), Error);
  CHECK_THROWS_AS(compute_weights(two_banks(), -1, 0, 0.1, 1.0), Error);
}

TEST_CASE("compute_weights agrees with the dense reference") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Topology t = seed % 2 ? gen_erdos_renyi(12, 0.3, RngStream{seed, 1})
                                : gen_preferential_attachment(12, 0.3, RngStream{seed, 1});
    const double s = static_cast<double>(seed % 3);
    const double tp = static_cast<double>((seed / 3) % 3);
    const WeightMatrix w = compute_weights(t, s, tp, 0.2, 3.0);
    const oracle::Matrix ref = oracle::weights(dense(t), s, tp, 0.2, 3.0);
    for (BankIndex i = 0; i < 12; ++i)
      for (BankIndex j = 0; j < 12; ++j)
        CHECK(w.weight(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-12));
  }
}

TEST_CASE("uniform powers give equal loans on every edge") {
  const Topology t = gen_preferential_attachment(300, 0.02, RngStream{8, 8});
  const WeightMatrix w = compute_weights(t, 0, 0, 0.1, 1.0);
  const double expected = 0.1 / 0.9 / static_cast<double>(t.edge_count());
  for (const Edge& e : t.edges()) {
    CHECK(std::abs(w.weight(e.creditor, e.debtor) - expected) <= 1e-12 * expected);
  }
}

TEST_CASE("degree-weighted loans concentrate lending") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Topology t = gen_preferential_attachment(500, 0.005, RngStream{seed, 2});
    const double flat = gini(compute_weights(t, 0, 0, 0.1, 1.0).loans());
    const double skewed = gini(compute_weights(t, 2, 2, 0.1, 1.0).loans());
    CHECK(skewed > flat);
  }
}

TEST_CASE("build_balance_sheets two-bank example") {
  const WeightMatrix w = compute_weights(two_banks(), 0, 0, 0.1, 1.8);
  const BalanceSheetSet bs = build_balance_sheets(w, 0.1, 0.05, 1.8);
  CHECK(bs.external_asset[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(bs.external_asset[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bs.asset[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bs.asset[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bs.net_worth[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(bs.net_worth[1] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(bs.deposits[1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(validate(bs).empty());
}

TEST_CASE("balanced positions spread external assets evenly") {
  Rng rng(2);
  const Topology t = gen_erdos_renyi(7, 1.0, rng);
  const BalanceSheetSet bs = build_balance_sheets(compute_weights(t, 1, 1, 0.2, 7.0), 0.2, 0.1, 7.0);
  for (double e : bs.external_asset) CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("balance sheets match the dense reference") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Topology t = gen_erdos_renyi(10, 0.25, RngStream{seed, 4});
    if (t.edge_count() == 0) continue;
    const WeightMatrix w = compute_weights(t, 1, 2, 0.3, 2.0);
    const BalanceSheetSet bs = build_balance_sheets(w, 0.3, 0.07, 2.0);
    const oracle::Sheets ref = oracle::sheets(oracle::weights(dense(t), 1, 2, 0.3, 2.0), 0.07, 2.0);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(bs.external_asset[i] == doctest::Approx(ref.e[i]).epsilon(1e-12));
      CHECK(bs.net_worth[i] == doctest::Approx(ref.c[i]).epsilon(1e-12));
      CHECK(bs.deposits[i] == doctest::Approx(ref.d[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("balance sheet parameter errors") {
  const WeightMatrix w = compute_weights(two_banks(), 0, 0, 0.1, 1.8);
  CHECK_THROWS_AS(build_balance_sheets(w, 0.1, 0.0, 1.8), Error);
  CHECK_THROWS_AS(build_balance_sheets(w, 0.1, 1.0, 1.8), Error);
  // Weights built for a different Q.
  CHECK_THROWS_AS(build_balance_sheets(w, 0.2, 0.05, 1.8), Error);
}

TEST_CASE("apply_surcharge") {
  const WeightMatrix w = compute_weights(two_banks(), 0, 0, 0.1, 1.8);
  const BalanceSheetSet bs = build_balance_sheets(w, 0.1, 0.05, 1.8);

  SUBCASE("zero ratio or empty selection leaves sheets untouched") {
    CHECK(apply_surcharge(bs, 0.0, 0.5) == bs);
    BalanceSheetSet none = apply_surcharge(bs, 0.025, 0.0);
    CHECK(none.net_worth == bs.net_worth);
    CHECK(none.external_asset == bs.external_asset);
  }
  SUBCASE("both forms of the increment agree") {
    // Both banks have A = 1.0; the tie goes to equal degree, then index 0.
    const BalanceSheetSet out = apply_surcharge(bs, 0.025, 0.5);
    const double extra = 0.025 / 0.925;
    CHECK(out.surcharge[0] == doctest::Approx(extra).epsilon(1e-14));
    CHECK(out.surcharge[0] == doctest::Approx(0.025 / 0.925 * bs.net_worth[0] / 0.05).epsilon(1e-14));
    CHECK(out.surcharge[0] == doctest::Approx(0.027027027).epsilon(1e-8));
    CHECK(out.surcharge[1] == 0.0);
    CHECK(out.net_worth[0] == doctest::Approx(0.05 + extra).epsilon(1e-14));
    CHECK(out.external_asset[0] == doctest::Approx(0.8 + extra).epsilon(1e-14));
    CHECK(out.asset[0] == doctest::Approx(1.0 + extra).epsilon(1e-14));
    CHECK(out.deposits[0] == bs.deposits[0]);
    CHECK(validate(out).empty());
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(apply_surcharge(bs, 0.95, 0.5), Error);
    CHECK_THROWS_AS(apply_surcharge(bs, -0.1, 0.5), Error);
    CHECK_THROWS_AS(apply_surcharge(bs, 0.01, 1.5), Error);
    CHECK_THROWS_AS(apply_surcharge(apply_surcharge(bs, 0.01, 0.5), 0.01, 0.5), Error);
  }
}

TEST_CASE("biggest banks are ranked by asset, then degree, then index") {
  BalanceSheetSet bs;
  bs.asset = {1.0, 3.0, 2.0, 3.0, 2.0};
  bs.total_degree = {9, 1, 4, 2, 4};
  CHECK(biggest_banks(bs, 0.4) == std::vector<BankIndex>{3, 1});
  CHECK(biggest_banks(bs, 0.8) == std::vector<BankIndex>{3, 1, 2, 4});
  CHECK(biggest_banks(bs, 0.1).empty());
}

TEST_CASE("surcharge on the biggest tenth of a large network keeps identities") {
  const Topology t = gen_preferential_attachment(500, 0.005, RngStream{1, 1});
  const WeightMatrix w = compute_weights(t, 2, 2, 0.1, 1.0);
  const BalanceSheetSet out = apply_surcharge(build_balance_sheets(w, 0.1, 0.04, 1.0), 0.025, 0.1);
  CHECK(std::count_if(out.surcharge.begin(), out.surcharge.end(), [](double x) { return x > 0; }) == 50);
  CHECK(validate(out).clean());
}

TEST_CASE("validate reports injected faults") {
  const WeightMatrix w = compute_weights(Topology(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}}), 0, 0, 0.1, 1.0);
  BalanceSheetSet bs = build_balance_sheets(w, 0.1, 0.05, 1.0);
  REQUIRE(validate(bs).empty());

  SUBCASE("halved net worth") {
    bs.net_worth[0] /= 2;
    const ValidationReport r = validate(bs);
    CHECK_FALSE(r.clean());
    bool ratio = false;
    for (const Violation& v : r.violations) ratio |= (v.identity == "C/L=R" && v.bank == 0);
    CHECK(ratio);
  }
  SUBCASE("negative deposits are a warning") {
    bs.deposits[1] = -0.01;
    const ValidationReport r = validate(bs);
    bool warned = false;
    for (const Violation& v : r.violations) {
      warned |= (v.identity == "D>=0" && v.bank == 1 && v.severity == Severity::Warning);
    }
    CHECK(warned);
  }
}

TEST_CASE("large R produces negative-deposit warnings but no errors") {
  const Topology t = gen_preferential_attachment(200, 0.05, RngStream{3, 3});
  const BalanceSheetSet bs = build_balance_sheets(compute_weights(t, 2, 2, 0.4, 1.0), 0.4, 0.9, 1.0);
  const ValidationReport r = validate(bs);
  CHECK(r.clean());
  CHECK_FALSE(r.empty());
}

TEST_CASE("balance csv layout") {
  const BalanceSheetSet bs = build_balance_sheets(compute_weights(two_banks(), 0, 0, 0.1, 1.8), 0.1, 0.05, 1.8);
  std::ostringstream out;
  write_balance_csv(out, bs);
  std::istringstream in(out.str());
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  CHECK(header == "bank,E,I,B,C,D,A,surcharge");
  CHECK(row0.rfind("0,0.8", 0) == 0);
  CHECK(row1.rfind("1,1,0,0.2", 0) == 0);
}
