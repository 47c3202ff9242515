#include "contagion/cascade.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "contagion/error.hpp"
#include "contagion/format.hpp"

namespace contagion {

const char* to_string(LossRule rule) {
  switch (rule) {
    case LossRule::PaperMax: return "paper_max";
    case LossRule::CappedMin: return "capped_min";
  }
  return "unknown";
}

LossRule parse_loss_rule(std::string_view text) {
  if (text == "paper_max") return LossRule::PaperMax;
  if (text == "capped_min") return LossRule::CappedMin;
  fail(ErrorKind::InvalidParameter,
       "unknown loss rule '" + std::string(text) + "' (expected paper_max or capped_min)");
}

double transmitted_distress(LossRule rule, double distress, double net_worth, double borrowing) {
  const double residual = distress - net_worth;
  return rule == LossRule::PaperMax ? std::max(residual, borrowing)
                                    : std::min(residual, borrowing);
}

void initial_shock_into(const BalanceSheetSet& sheets, BankIndex bank, ShockState& state) {
  const std::size_t n = sheets.size();
  if (bank >= n) {
    fail(ErrorKind::InvalidParameter,
         "initial bank " + std::to_string(bank) + " out of range for N=" + std::to_string(n));
  }
  state.distress.assign(n, 0.0);
  state.defaulted.assign(n, 0);
  state.round = 0;
  state.initial_bank = bank;
  state.distress[bank] = sheets.external_asset[bank];
}

ShockState initial_shock(const BalanceSheetSet& sheets, BankIndex bank) {
  ShockState state;
  initial_shock_into(sheets, bank, state);
  return state;
}

std::vector<Claim> transmit_shares(const WeightMatrix& weights, BankIndex debtor, double residual) {
  std::vector<Claim> shares;
  const double borrowing = weights.borrowings()[debtor];
  if (!(borrowing > 0.0)) return shares;
  for (const Claim& c : weights.creditors_of(debtor)) {
    shares.push_back({c.bank, c.amount / borrowing * residual});
  }
  return shares;
}

namespace {

// Shared round loop. `records` may be null when only the count is needed.
std::size_t run_rounds(const BalanceSheetSet& sheets, const WeightMatrix& weights,
                       ShockState& state, LossRule rule, CascadeResult* result) {
  const std::size_t n = sheets.size();
  const auto& offsets = weights.creditor_offsets();
  const auto& claims = weights.creditor_claims();
  const auto& borrowing = weights.borrowings();

  std::vector<BankIndex> candidates;
  for (std::size_t j = 0; j < n; ++j) {
    if (!state.defaulted[j] && state.distress[j] > 0.0) candidates.push_back(static_cast<BankIndex>(j));
  }

  std::vector<BankIndex> failing;
  std::vector<std::uint8_t> touched(n, 0);
  std::size_t total = 0;
  while (!candidates.empty()) {
    failing.clear();
    for (BankIndex j : candidates) {
      touched[j] = 0;
      if (!state.defaulted[j] && sheets.net_worth[j] <= state.distress[j]) failing.push_back(j);
    }
    candidates.clear();
    if (failing.empty()) break;

    ++state.round;
    for (BankIndex d : failing) state.defaulted[d] = 1;
    for (BankIndex d : failing) {
      double transmitted = 0.0;
      double delivered = 0.0;
      if (borrowing[d] > 0.0) {
        transmitted = transmitted_distress(rule, state.distress[d], sheets.net_worth[d], borrowing[d]);
        for (std::size_t k = offsets[d]; k < offsets[d + 1]; ++k) {
          const BankIndex j = claims[k].bank;
          if (state.defaulted[j]) continue;
          const double share = claims[k].amount / borrowing[d] * transmitted;
          state.distress[j] += share;
          delivered += share;
          if (!touched[j]) {
            touched[j] = 1;
            candidates.push_back(j);
          }
        }
      }
      if (result) {
        result->default_set.push_back({d, state.round, state.distress[d], transmitted, delivered});
        result->total_loss_transmitted += transmitted;
      }
    }
    total += failing.size();
    std::sort(candidates.begin(), candidates.end());
  }
  return total;
}

}  // namespace

CascadeResult propagate(const BalanceSheetSet& sheets, const WeightMatrix& weights,
                        ShockState& state, LossRule rule) {
  if (state.distress.size() != sheets.size() || state.defaulted.size() != sheets.size()) {
    fail(ErrorKind::InvalidParameter, "shock state does not match balance sheets");
  }
  CascadeResult result;
  result.initial_bank = state.initial_bank;
  const std::size_t start_round = state.round;
  result.n_defaults = run_rounds(sheets, weights, state, rule, &result);
  result.rounds = state.round - start_round;
  return result;
}

std::size_t CascadeRunner::count_defaults(const BalanceSheetSet& sheets,
                                          const WeightMatrix& weights, BankIndex bank,
                                          LossRule rule) {
  initial_shock_into(sheets, bank, state_);
  return run_rounds(sheets, weights, state_, rule, nullptr);
}

void write_trace(std::ostream& out, const CascadeResult& result) {
  for (const DefaultRecord& r : result.default_set) {
    out << "{\"round\":" << r.round << ",\"bank\":" << r.bank
        << ",\"distress\":" << format_double(r.distress)
        << ",\"transmitted\":" << format_double(r.transmitted)
        << ",\"delivered\":" << format_double(r.delivered) << "}\n";
  }
}

}  // namespace contagion
