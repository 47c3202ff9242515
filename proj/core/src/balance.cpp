#include "contagion/balance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>

#include "contagion/error.hpp"
#include "contagion/format.hpp"

namespace contagion {

namespace {

void check_q(double q) {
  if (!(q > 0.0 && q < 0.5)) {
    fail(ErrorKind::InvalidParameter, "Q=" + std::to_string(q) + " outside (0, 0.5)");
  }
}

double relative_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

}  // namespace

double WeightMatrix::weight(BankIndex creditor, BankIndex debtor) const {
  const auto first = by_creditor_.begin() + static_cast<std::ptrdiff_t>(by_creditor_offset_[creditor]);
  const auto last = by_creditor_.begin() + static_cast<std::ptrdiff_t>(by_creditor_offset_[creditor + 1]);
  const auto it = std::lower_bound(first, last, debtor,
                                   [](const Claim& c, BankIndex b) { return c.bank < b; });
  return (it != last && it->bank == debtor) ? it->amount : 0.0;
}

std::vector<Claim> WeightMatrix::debtors_of(BankIndex creditor) const {
  return {by_creditor_.begin() + static_cast<std::ptrdiff_t>(by_creditor_offset_[creditor]),
          by_creditor_.begin() + static_cast<std::ptrdiff_t>(by_creditor_offset_[creditor + 1])};
}

std::vector<Claim> WeightMatrix::creditors_of(BankIndex debtor) const {
  return {by_debtor_.begin() + static_cast<std::ptrdiff_t>(by_debtor_offset_[debtor]),
          by_debtor_.begin() + static_cast<std::ptrdiff_t>(by_debtor_offset_[debtor + 1])};
}

WeightMatrix compute_weights(const Topology& topology, double s, double t, double q,
                             double total_external) {
  check_q(q);
  if (!(total_external > 0.0) || !std::isfinite(total_external)) {
    fail(ErrorKind::InvalidParameter, "total external assets E must be positive");
  }
  if (!(s >= 0.0) || !(t >= 0.0)) {
    fail(ErrorKind::InvalidParameter, "heterogeneity powers s, t must be >= 0");
  }
  if (topology.edge_count() == 0) {
    fail(ErrorKind::NoInterbankMarket, "topology has no credit relations");
  }

  const std::size_t n = topology.size();
  const DegreeStats degrees = degree_stats(topology);
  const auto& edges = topology.edges();

  // std::pow(0, 0) == 1, matching the uniform-loan convention.
  std::vector<double> out_factor(n);
  std::vector<double> in_factor(n);
  for (std::size_t i = 0; i < n; ++i) {
    out_factor[i] = std::pow(static_cast<double>(degrees.out_degree[i]), s);
    in_factor[i] = std::pow(static_cast<double>(degrees.in_degree[i]), t);
  }

  std::vector<double> raw(edges.size());
  double norm = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    raw[e] = out_factor[edges[e].creditor] * in_factor[edges[e].debtor];
    norm += raw[e];
  }
  const double total_loans = q / (1.0 - q) * total_external;

  WeightMatrix wm;
  wm.s_ = s;
  wm.t_ = t;
  wm.loans_.assign(n, 0.0);
  wm.borrowings_.assign(n, 0.0);
  wm.total_degree_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wm.total_degree_[i] = degrees.out_degree[i] + degrees.in_degree[i];
  }

  // Edges are sorted by (creditor, debtor): the creditor grouping is direct.
  wm.by_creditor_offset_.assign(n + 1, 0);
  wm.by_creditor_.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double w = raw[e] / norm * total_loans;
    wm.by_creditor_[e] = {edges[e].debtor, w};
    ++wm.by_creditor_offset_[edges[e].creditor + 1];
  }
  std::partial_sum(wm.by_creditor_offset_.begin(), wm.by_creditor_offset_.end(),
                   wm.by_creditor_offset_.begin());

  wm.by_debtor_offset_.assign(n + 1, 0);
  for (const Edge& e : edges) ++wm.by_debtor_offset_[e.debtor + 1];
  std::partial_sum(wm.by_debtor_offset_.begin(), wm.by_debtor_offset_.end(),
                   wm.by_debtor_offset_.begin());
  wm.by_debtor_.resize(edges.size());
  std::vector<std::size_t> cursor(wm.by_debtor_offset_.begin(), wm.by_debtor_offset_.end() - 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double w = wm.by_creditor_[e].amount;
    wm.by_debtor_[cursor[edges[e].debtor]++] = {edges[e].creditor, w};
    wm.loans_[edges[e].creditor] += w;
    wm.borrowings_[edges[e].debtor] += w;
    wm.total_ += w;
  }
  return wm;
}

void build_balance_sheets_into(const WeightMatrix& weights, double q, double r,
                               double total_external, BalanceSheetSet& out) {
  check_q(q);
  if (!(r > 0.0 && r < 1.0)) {
    fail(ErrorKind::InvalidParameter, "R=" + std::to_string(r) + " outside (0, 1)");
  }
  const double expected_total = q / (1.0 - q) * total_external;
  if (relative_gap(weights.total(), expected_total) > kValidationTolerance) {
    fail(ErrorKind::InvalidParameter, "weight matrix total is inconsistent with Q and E");
  }

  const std::size_t n = weights.size();
  const auto& loans = weights.loans();
  const auto& borrowings = weights.borrowings();

  double net_borrowing_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    net_borrowing_total += std::max(borrowings[i] - loans[i], 0.0);
  }
  const double spread = total_external - net_borrowing_total;
  if (!(spread > 0.0)) {
    fail(ErrorKind::InfeasibleBalance,
         "total external assets do not cover aggregate net interbank borrowing");
  }
  const double share = spread / static_cast<double>(n);

  out.external_asset.resize(n);
  out.interbank_loans = loans;
  out.interbank_borrowing = borrowings;
  out.net_worth.resize(n);
  out.deposits.resize(n);
  out.asset.resize(n);
  out.liability.resize(n);
  out.surcharge.assign(n, 0.0);
  out.total_degree = weights.total_degree();
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::max(borrowings[i] - loans[i], 0.0) + share;
    const double a = e + loans[i];
    const double c = r * a;
    out.external_asset[i] = e;
    out.asset[i] = a;
    out.liability[i] = a;
    out.net_worth[i] = c;
    out.deposits[i] = a - c - borrowings[i];
  }
  out.constants = {q, r, total_external, 0.0, weights.power_s(), weights.power_t()};
}

BalanceSheetSet build_balance_sheets(const WeightMatrix& weights, double q, double r,
                                     double total_external) {
  BalanceSheetSet sheets;
  build_balance_sheets_into(weights, q, r, total_external, sheets);
  return sheets;
}

std::vector<BankIndex> biggest_banks(const BalanceSheetSet& sheets, double fraction) {
  const std::size_t n = sheets.size();
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<BankIndex> order(n);
  std::iota(order.begin(), order.end(), BankIndex{0});
  const auto bigger = [&](BankIndex a, BankIndex b) {
    if (sheets.asset[a] != sheets.asset[b]) return sheets.asset[a] > sheets.asset[b];
    if (sheets.total_degree[a] != sheets.total_degree[b]) {
      return sheets.total_degree[a] > sheets.total_degree[b];
    }
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(count, n)),
                    order.end(), bigger);
  order.resize(std::min(count, n));
  return order;
}

void apply_surcharge_in_place(BalanceSheetSet& sheets, double surcharge_ratio,
                              double biggest_fraction) {
  const double r = sheets.constants.r;
  if (!(surcharge_ratio >= 0.0) || !(r + surcharge_ratio < 1.0)) {
    fail(ErrorKind::InvalidParameter, "surcharge ratio R_s must satisfy 0 <= R_s < 1 - R");
  }
  if (!(biggest_fraction >= 0.0 && biggest_fraction <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "surcharge fraction must lie in [0, 1]");
  }
  if (sheets.constants.surcharge_ratio != 0.0) {
    fail(ErrorKind::InvalidParameter, "surcharge already applied to these balance sheets");
  }
  if (surcharge_ratio == 0.0) return;

  const double factor = surcharge_ratio / (1.0 - r - surcharge_ratio);
  for (BankIndex i : biggest_banks(sheets, biggest_fraction)) {
    const double extra = factor * sheets.asset[i];
    sheets.surcharge[i] = extra;
    sheets.net_worth[i] += extra;
    sheets.external_asset[i] += extra;
    sheets.asset[i] += extra;
    sheets.liability[i] += extra;
  }
  sheets.constants.surcharge_ratio = surcharge_ratio;
}

BalanceSheetSet apply_surcharge(const BalanceSheetSet& sheets, double surcharge_ratio,
                                double biggest_fraction) {
  BalanceSheetSet out = sheets;
  apply_surcharge_in_place(out, surcharge_ratio, biggest_fraction);
  return out;
}

bool ValidationReport::clean() const {
  return std::none_of(violations.begin(), violations.end(),
                      [](const Violation& v) { return v.severity == Severity::Error; });
}

ValidationReport validate(const BalanceSheetSet& sheets) {
  ValidationReport report;
  const std::size_t n = sheets.size();
  const auto& k = sheets.constants;
  constexpr std::size_t kAggregate = SIZE_MAX;
  auto flag = [&](std::size_t bank, const char* identity, double magnitude,
                  Severity severity = Severity::Error) {
    report.violations.push_back({bank, identity, magnitude, severity});
  };

  double sum_external = 0.0;
  double sum_loans = 0.0;
  double sum_borrowing = 0.0;
  double sum_asset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double extra = sheets.surcharge[i];
    const double pristine_e = sheets.external_asset[i] - extra;
    const double pristine_l = sheets.liability[i] - extra;
    const double pristine_c = sheets.net_worth[i] - extra;

    if (double gap = relative_gap(sheets.asset[i], sheets.external_asset[i] + sheets.interbank_loans[i]);
        gap > kValidationTolerance) {
      flag(i, "A=E+I", gap);
    }
    if (double gap = relative_gap(sheets.liability[i], sheets.asset[i]); gap > kValidationTolerance) {
      flag(i, "L=A", gap);
    }
    const double rhs = sheets.net_worth[i] + sheets.interbank_borrowing[i] + sheets.deposits[i];
    if (double gap = std::abs(sheets.liability[i] - rhs) /
                     std::max(std::abs(sheets.liability[i]), std::numeric_limits<double>::min());
        gap > kValidationTolerance) {
      flag(i, "L=C+B+D", gap);
    }
    if (pristine_l > 0.0) {
      if (double gap = relative_gap(pristine_c / pristine_l, k.r); gap > kValidationTolerance) {
        flag(i, "C/L=R", gap);
      }
    }
    const double net_borrowing = sheets.interbank_borrowing[i] - sheets.interbank_loans[i];
    if (!(pristine_e > net_borrowing)) {
      flag(i, "E>B-I", net_borrowing - pristine_e);
    }
    if (sheets.deposits[i] < 0.0) {
      flag(i, "D>=0", sheets.deposits[i], Severity::Warning);
    }
    sum_external += pristine_e;
    sum_loans += sheets.interbank_loans[i];
    sum_borrowing += sheets.interbank_borrowing[i];
    sum_asset += sheets.asset[i] - extra;
  }

  const double total_loans = k.q / (1.0 - k.q) * k.total_external;
  if (double gap = relative_gap(sum_external, k.total_external); gap > kValidationTolerance) {
    flag(kAggregate, "sum(E)=E", gap);
  }
  if (double gap = relative_gap(sum_loans, total_loans); gap > kValidationTolerance) {
    flag(kAggregate, "sum(I)=Q/(1-Q)E", gap);
  }
  if (double gap = relative_gap(sum_borrowing, total_loans); gap > kValidationTolerance) {
    flag(kAggregate, "sum(B)=Q/(1-Q)E", gap);
  }
  if (sum_asset > 0.0) {
    if (double gap = relative_gap(sum_loans / sum_asset, k.q); gap > kValidationTolerance) {
      flag(kAggregate, "I=QA", gap);
    }
  }
  return report;
}

void write_balance_csv(std::ostream& out, const BalanceSheetSet& sheets) {
  out << "bank,E,I,B,C,D,A,surcharge\n";
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    out << i << ',' << format_double(sheets.external_asset[i]) << ','
        << format_double(sheets.interbank_loans[i]) << ','
        << format_double(sheets.interbank_borrowing[i]) << ',' << format_double(sheets.net_worth[i])
        << ',' << format_double(sheets.deposits[i]) << ',' << format_double(sheets.asset[i]) << ','
        << format_double(sheets.surcharge[i]) << '\n';
  }
}

void write_validation_report(std::ostream& out, const ValidationReport& report) {
  for (const Violation& v : report.violations) {
    out << (v.severity == Severity::Error ? "error" : "warning") << ' ' << v.identity;
    if (v.bank != SIZE_MAX) out << " bank=" << v.bank;
    out << " magnitude=" << v.magnitude << '\n';
  }
}

double gini(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    weighted += static_cast<double>(i + 1) * values[i];
    total += values[i];
  }
  if (total == 0.0) return 0.0;
  const auto n = static_cast<double>(values.size());
  return (2.0 * weighted) / (n * total) - (n + 1.0) / n;
}

}  // namespace contagion
