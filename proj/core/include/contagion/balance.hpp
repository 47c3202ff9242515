#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "contagion/topology.hpp"

namespace contagion {

/// A creditor's claim on one debtor.
struct Claim {
  BankIndex bank;  // counterparty
  double amount;   // w
};

/// Interbank loan amounts w_ij and their marginals.
///
/// Loans are stored twice: grouped by creditor (who lends to whom) and grouped
/// by debtor (who is exposed to a default). Both orders are ascending in the
/// counterparty index.
class WeightMatrix {
 public:
  std::size_t size() const noexcept { return loans_.size(); }

  /// Amount `debtor` borrows from `creditor`; zero when there is no edge.
  double weight(BankIndex creditor, BankIndex debtor) const;

  /// Debtors of `creditor` with the amounts lent to each.
  std::vector<Claim> debtors_of(BankIndex creditor) const;
  /// Creditors of `debtor` with the amounts each lent to it.
  std::vector<Claim> creditors_of(BankIndex debtor) const;

  const std::vector<double>& loans() const noexcept { return loans_; }            // I_i
  const std::vector<double>& borrowings() const noexcept { return borrowings_; }  // B_i
  const std::vector<std::uint32_t>& total_degree() const noexcept { return total_degree_; }
  double total() const noexcept { return total_; }
  double power_s() const noexcept { return s_; }
  double power_t() const noexcept { return t_; }

  // Raw CSR access for hot loops; see creditors_of().
  const std::vector<std::size_t>& creditor_offsets() const noexcept { return by_debtor_offset_; }
  const std::vector<Claim>& creditor_claims() const noexcept { return by_debtor_; }

 private:
  friend WeightMatrix compute_weights(const Topology&, double, double, double, double);

  std::vector<std::size_t> by_creditor_offset_;
  std::vector<Claim> by_creditor_;
  std::vector<std::size_t> by_debtor_offset_;
  std::vector<Claim> by_debtor_;
  std::vector<double> loans_;
  std::vector<double> borrowings_;
  std::vector<std::uint32_t> total_degree_;
  double total_ = 0.0;
  double s_ = 0.0;
  double t_ = 0.0;
};

/// w_ij = l_ij g_i^s c_j^t / sum_ab(l_ab g_a^s c_b^t) * Q/(1-Q) * E, with the
/// normalization taken over all ordered pairs so total loans are Q/(1-Q) E.
/// 0^0 is 1, so s = t = 0 spreads loans evenly over the edges.
WeightMatrix compute_weights(const Topology& topology, double s, double t, double q,
                             double total_external);

struct BalanceConstants {
  double q = 0.0;               // total interbank loans / total assets
  double r = 0.0;               // equity capital ratio
  double total_external = 1.0;  // E
  double surcharge_ratio = 0.0; // R_s
  double s = 0.0;
  double t = 0.0;
  friend bool operator==(const BalanceConstants&, const BalanceConstants&) = default;
};

/// Per-bank balance sheets; every vector has one entry per bank.
struct BalanceSheetSet {
  std::vector<double> external_asset;  // E_i (includes surcharge capital)
  std::vector<double> interbank_loans;  // I_i
  std::vector<double> interbank_borrowing;  // B_i
  std::vector<double> net_worth;  // C_i (includes surcharge capital)
  std::vector<double> deposits;   // D_i
  std::vector<double> asset;      // A_i
  std::vector<double> liability;  // L_i
  std::vector<double> surcharge;  // C'_i
  std::vector<std::uint32_t> total_degree;
  BalanceConstants constants;

  std::size_t size() const noexcept { return asset.size(); }
  friend bool operator==(const BalanceSheetSet&, const BalanceSheetSet&) = default;
};

/// E_i = max(B_i - I_i, 0) + (E - sum_k max(B_k - I_k, 0)) / N, then
/// A_i = L_i = E_i + I_i, C_i = R L_i and D_i = L_i - C_i - B_i.
BalanceSheetSet build_balance_sheets(const WeightMatrix& weights, double q, double r,
                                     double total_external);

/// Same as build_balance_sheets, writing into `out` to reuse its storage.
void build_balance_sheets_into(const WeightMatrix& weights, double q, double r,
                               double total_external, BalanceSheetSet& out);

/// Banks receiving the surcharge: the floor(fraction * N) largest by asset,
/// ties broken by larger total degree, then lower index.
std::vector<BankIndex> biggest_banks(const BalanceSheetSet& sheets, double fraction);

/// Imposes the additional capital ratio R_s on the biggest banks:
/// C'_i = R_s / (1 - R - R_s) * A_i, booked as external asset and net worth.
BalanceSheetSet apply_surcharge(const BalanceSheetSet& sheets, double surcharge_ratio,
                                double biggest_fraction);
void apply_surcharge_in_place(BalanceSheetSet& sheets, double surcharge_ratio,
                              double biggest_fraction);

enum class Severity { Error, Warning };

struct Violation {
  std::size_t bank;  // bank index, or SIZE_MAX for aggregate identities
  std::string identity;
  double magnitude;  // relative deviation (or the offending value)
  Severity severity;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool clean() const;  // no errors; warnings allowed
  bool empty() const noexcept { return violations.empty(); }
};

inline constexpr double kValidationTolerance = 1e-9;

ValidationReport validate(const BalanceSheetSet& sheets);

void write_balance_csv(std::ostream& out, const BalanceSheetSet& sheets);
void write_validation_report(std::ostream& out, const ValidationReport& report);

/// Gini coefficient of non-negative values.
double gini(std::vector<double> values);

}  // namespace contagion
