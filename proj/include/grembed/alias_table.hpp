#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "grembed/rng.hpp"

namespace grembed::num {

// Vose alias method: O(1) draws from a fixed discrete distribution.
class AliasTable {
public:
    AliasTable() = default;
    // Weights must be non-negative with a positive sum.
    explicit AliasTable(std::span<const double> weights);

    std::size_t size() const noexcept { return prob_.size(); }
    std::size_t sample(Rng& rng) const noexcept {
        const auto i = static_cast<std::size_t>(rng.below(prob_.size()));
        return rng.uniform() < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

}  // namespace grembed::num
