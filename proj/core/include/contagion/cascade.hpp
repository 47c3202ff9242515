#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "contagion/balance.hpp"

namespace contagion {

/// Residual distress a defaulted bank passes to its creditors.
enum class LossRule {
  PaperMax,   // max(S - C, B): creditors lose at least their full exposure
  CappedMin,  // min(S - C, B): creditors lose at most their full exposure
};

const char* to_string(LossRule rule);
LossRule parse_loss_rule(std::string_view text);

double transmitted_distress(LossRule rule, double distress, double net_worth, double borrowing);

struct ShockState {
  std::vector<double> distress;        // accumulated S_j
  std::vector<std::uint8_t> defaulted;
  std::size_t round = 0;
  BankIndex initial_bank = 0;
};

/// Strikes `bank` with distress equal to its whole external asset.
ShockState initial_shock(const BalanceSheetSet& sheets, BankIndex bank);
void initial_shock_into(const BalanceSheetSet& sheets, BankIndex bank, ShockState& state);

struct DefaultRecord {
  BankIndex bank;
  std::size_t round;
  double distress;     // accumulated distress when the bank failed
  double transmitted;  // T_d passed on (zero if the bank had no creditors)
  double delivered;    // part of T_d that reached surviving creditors
};

struct CascadeResult {
  std::size_t n_defaults = 0;
  std::vector<DefaultRecord> default_set;
  BankIndex initial_bank = 0;
  std::size_t rounds = 0;
  double total_loss_transmitted = 0.0;
};

/// Pro-rata split of `residual` over the creditors of `debtor`:
/// w_{j,debtor} / B_debtor * residual. Empty when the debtor has no creditors.
std::vector<Claim> transmit_shares(const WeightMatrix& weights, BankIndex debtor, double residual);

/// Runs synchronous default rounds until quiescence. A bank j fails when
/// C_j <= S_j. Every bank failing in a round passes its transmitted distress
/// to creditors still alive, where it accumulates; shares aimed at failed
/// banks are dropped. `state` holds the final distress and default flags.
CascadeResult propagate(const BalanceSheetSet& sheets, const WeightMatrix& weights,
                        ShockState& state, LossRule rule);

/// Reusable buffers for running many cascades on one network.
class CascadeRunner {
 public:
  /// Shocks `bank` and returns N_d. Does not record the default set.
  std::size_t count_defaults(const BalanceSheetSet& sheets, const WeightMatrix& weights,
                             BankIndex bank, LossRule rule);

  const ShockState& state() const noexcept { return state_; }

 private:
  ShockState state_;
};

/// One JSON object per line per default record.
void write_trace(std::ostream& out, const CascadeResult& result);

}  // namespace contagion
