#include "grembed/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grembed/error.hpp"
#include "grembed/rng.hpp"

namespace grembed {

namespace {
const ItemSet kNoItems;
}

const ItemSet& GroundTruth::of(const UserId& u) const {
    const auto it = high_rated.find(u);
    return it == high_rated.end() ? kNoItems : it->second;
}

GroundTruth GroundTruth::from_liked(const RatingsTable& ratings) {
    GroundTruth t;
    for (const auto& [u, items] : ratings.liked)
        if (!items.empty()) t.high_rated.emplace(u, items);
    return t;
}

std::vector<BusinessId> WeightedRecommendations::ids() const {
    std::vector<BusinessId> out;
    out.reserve(items.size());
    for (const auto& s : items) out.push_back(s.item);
    return out;
}

namespace rec {

std::vector<UserId> select_top_users(const WeightedGraph& g, std::size_t count) {
    if (count > g.size()) throw ValidationError("select_top_users: count exceeds node count");
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) ranked.emplace_back(g.weighted_degree(i), i);
    // Node indices follow id order, so index order is the id tie-break.
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<UserId> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(g.user(ranked[i].second));
    return out;
}

std::set<UserId> eligible_recommenders(const GroundTruth& truth, std::size_t lower, std::size_t upper) {
    if (lower < 1 || lower > upper) throw ValidationError("eligible_recommenders: need 1 <= lower <= upper");
    std::set<UserId> out;
    for (const auto& [u, items] : truth.high_rated)
        if (items.size() >= lower && items.size() <= upper) out.insert(u);
    return out;
}

WeightedRecommendations recommend_for_user(const UserId& user, const Embedding& embedding,
                                           const cluster::Clustering& clustering, const GroundTruth& truth,
                                           const std::set<UserId>& eligible, const RecommendParams& params) {
    if (params.n_neighbors < 1) throw ValidationError("recommend: n_neighbors must be >= 1");
    const auto row = embedding.row_of(user);
    if (!row) throw ColdUserError("user " + user + " has no embedding");
    if (clustering.assignment.size() != embedding.size())
        throw ValidationError("recommend: clustering does not match the embedding");

    const auto query = embedding.row(*row);
    const std::size_t cluster = cluster::predict_cluster(clustering, query);

    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (i == *row || clustering.assignment[i] != cluster) continue;
        if (!eligible.contains(embedding.users()[i])) continue;
        double d = 0.0;
        const auto other = embedding.row(i);
        for (std::size_t j = 0; j < other.size(); ++j) d += (other[j] - query[j]) * (other[j] - query[j]);
        candidates.emplace_back(d, i);
    }
    // Rows follow the graph's id order, so the row index breaks distance ties by id.
    std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return embedding.users()[a.second] < embedding.users()[b.second];
    });
    if (candidates.size() > params.n_neighbors) candidates.resize(params.n_neighbors);

    std::map<BusinessId, int> votes;
    for (const auto& [_, i] : candidates)
        for (const auto& item : truth.of(embedding.users()[i])) ++votes[item];
    for (const auto& own : truth.of(user)) votes.erase(own);

    WeightedRecommendations out;
    out.user = user;
    for (const auto& [item, w] : votes) out.items.push_back({item, w});
    std::stable_sort(out.items.begin(), out.items.end(),
                     [](const ScoredItem& a, const ScoredItem& b) { return a.weight > b.weight; });
    if (out.items.size() > params.k) out.items.resize(params.k);
    return out;
}

ItemSet common_recommendations(const WeightedRecommendations& recommended, const ItemSet& truth) {
    ItemSet out;
    for (const auto& s : recommended.items)
        if (truth.contains(s.item)) out.insert(s.item);
    return out;
}

HoldoutSplit split_holdout(const RatingsTable& ratings, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("holdout fraction must be in (0, 1)");
    HoldoutSplit out;
    out.visible = ratings;
    for (const auto& [user, items] : ratings.liked) {
        if (items.size() < 2) continue;
        std::vector<BusinessId> pool(items.begin(), items.end());
        num::Rng rng(num::derive_seed(seed, user));
        rng.shuffle(std::span<BusinessId>(pool));
        const auto take = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool.size()))), 1, pool.size() - 1);
        auto& visible = out.visible.liked[user];
        auto& hidden = out.held_out.high_rated[user];
        for (std::size_t i = 0; i < take; ++i) {
            visible.erase(pool[i]);
            hidden.insert(pool[i]);
        }
    }
    return out;
}

nlohmann::json to_json(const RecommendationMap& recs) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [user, r] : recs) {
        nlohmann::json items = nlohmann::json::array();
        for (const auto& s : r.items) items.push_back(nlohmann::json::array({s.item, s.weight}));
        j[user] = std::move(items);
    }
    return j;
}

RecommendationMap recommendations_from_json(const nlohmann::json& j) {
    RecommendationMap out;
    for (const auto& [user, items] : j.items()) {
        WeightedRecommendations r;
        r.user = user;
        for (const auto& pair : items) r.items.push_back({pair.at(0).get<std::string>(), pair.at(1).get<int>()});
        out.emplace(user, std::move(r));
    }
    return out;
}

nlohmann::json to_json(const GroundTruth& truth) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [user, items] : truth.high_rated) j[user] = std::vector<std::string>(items.begin(), items.end());
    return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
    GroundTruth t;
    for (const auto& [user, items] : j.items()) {
        const auto v = items.get<std::vector<std::string>>();
        t.high_rated.emplace(user, ItemSet(v.begin(), v.end()));
    }
    return t;
}

}  // namespace rec
}  // namespace grembed
