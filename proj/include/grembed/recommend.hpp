#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <json.hpp>

#include "grembed/embedding.hpp"
#include "grembed/ingest.hpp"
#include "grembed/kmeans.hpp"
#include "grembed/social_graph.hpp"

namespace grembed {

// Per-user high-rated items.
struct GroundTruth {
    std::map<UserId, ItemSet> high_rated;

    const ItemSet& of(const UserId& u) const;
    static GroundTruth from_liked(const RatingsTable& ratings);
    bool operator==(const GroundTruth&) const = default;
};

struct ScoredItem {
    BusinessId item;
    int weight = 0;

    bool operator==(const ScoredItem&) const = default;
};

// Items sorted by weight descending, then id ascending.
struct WeightedRecommendations {
    UserId user;
    std::vector<ScoredItem> items;

    std::vector<BusinessId> ids() const;
    bool operator==(const WeightedRecommendations&) const = default;
};

using RecommendationMap = std::map<UserId, WeightedRecommendations>;

namespace rec {

// Users by weighted degree descending, id ascending on ties.
std::vector<UserId> select_top_users(const WeightedGraph& g, std::size_t count);

std::set<UserId> eligible_recommenders(const GroundTruth& truth, std::size_t lower, std::size_t upper);

struct RecommendParams {
    std::size_t n_neighbors = 10;
    std::size_t k = 100;
};

/// Votes of the query user's nearest eligible neighbors inside their
/// predicted cluster. An item's weight is the number of chosen neighbors who
/// rated it high; the query user's own high-rated items are removed. Fewer
/// than n_neighbors candidates means all of them are used; none yields an
/// empty list. Throws ColdUserError when the user has no embedding row.
WeightedRecommendations recommend_for_user(const UserId& user, const Embedding& embedding,
                                           const cluster::Clustering& clustering, const GroundTruth& truth,
                                           const std::set<UserId>& eligible, const RecommendParams& params);

ItemSet common_recommendations(const WeightedRecommendations& recommended, const ItemSet& truth);

// Held-out evaluation split: a seeded fraction of each user's liked items is
// moved out of the visible table. Users with fewer than two liked items keep
// everything visible.
struct HoldoutSplit {
    RatingsTable visible;
    GroundTruth held_out;
};

HoldoutSplit split_holdout(const RatingsTable& ratings, double fraction, std::uint64_t seed);

nlohmann::json to_json(const RecommendationMap& recs);
RecommendationMap recommendations_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

}  // namespace rec
}  // namespace grembed
