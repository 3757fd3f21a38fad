#include "grembed/alias_table.hpp"

#include "grembed/error.hpp"

namespace grembed::num {

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    double total = 0.0;
    for (const double w : weights) {
        if (!(w >= 0.0)) throw ValidationError("alias table: negative weight");
        total += w;
    }
    if (n == 0 || total <= 0.0) throw ValidationError("alias table: weights must have a positive sum");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (const std::size_t i : large) prob_[i] = 1.0;
    for (const std::size_t i : small) prob_[i] = 1.0;
}

}  // namespace grembed::num
