#pragma once

#include <cstdint>
#include <vector>

namespace catbranch {

/// Walker/Vose alias table: O(1) draws from a finite law using one 64-bit word.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& probs);

  std::size_t size() const { return prob_.size(); }

  std::uint32_t sample(std::uint64_t bits) const {
    // high 32 bits pick the column, low 32 bits flip the biased coin
    const auto col = static_cast<std::uint32_t>(((bits >> 32) * prob_.size()) >> 32);
    const auto coin = static_cast<std::uint32_t>(bits);
    return coin < prob_[col] ? col : alias_[col];
  }

 private:
  std::vector<std::uint64_t> prob_;  // acceptance threshold scaled to 2^32
  std::vector<std::uint32_t> alias_;
};

}  // namespace catbranch
