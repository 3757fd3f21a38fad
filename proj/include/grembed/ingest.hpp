#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace grembed {

using UserId = std::string;
using BusinessId = std::string;
using ItemSet = std::set<BusinessId>;

struct Review {
    UserId user;
    BusinessId business;
    int stars = 0;

    bool operator==(const Review&) const = default;
};

// Unordered user pairs, each stored once as (smaller id, larger id).
struct FriendshipList {
    std::set<std::pair<UserId, UserId>> pairs;

    void add(const UserId& a, const UserId& b);
    bool contains(const UserId& a, const UserId& b) const;
};

struct RatingsTable {
    std::map<UserId, ItemSet> liked;
    std::map<UserId, ItemSet> disliked;
    int high_threshold = 4;
    int low_threshold = 2;

    const ItemSet& liked_by(const UserId& u) const;
    const ItemSet& disliked_by(const UserId& u) const;
    bool operator==(const RatingsTable&) const = default;
};

struct Dataset {
    std::vector<Review> reviews;
    FriendshipList friendships;
};

namespace ingest {

// Reviews from JSON lines carrying user_id, business_id, stars. Duplicate
// (user, business) pairs keep the highest stars; output is sorted by
// (user, business).
std::vector<Review> parse_reviews(std::istream& in, const std::string& source);

// Friend records carry user_id and friends, either a JSON array of ids or a
// comma-separated string as in the public Yelp dump ("None" means no friends).
FriendshipList parse_friendships(std::istream& in, const std::string& source);

Dataset parse_dataset(const std::filesystem::path& review_path, const std::filesystem::path& friends_path);

// Keeps only the highest-star review per (user, business), sorted.
std::vector<Review> deduplicate(std::vector<Review> reviews);

// Users with at least `min_reviews` reviews and at least one friend who also
// meets the review threshold.
std::set<UserId> filter_active_users(const std::vector<Review>& reviews, const FriendshipList& friendships,
                                     int min_reviews);

RatingsTable build_ratings_table(const std::vector<Review>& reviews, const std::set<UserId>& users,
                                 int high_threshold, int low_threshold);

// {user_id: {"liked": [...], "disliked": [...]}}; thresholds are not stored.
nlohmann::json to_json(const RatingsTable& table);
RatingsTable ratings_from_json(const nlohmann::json& j, int high_threshold, int low_threshold);

}  // namespace ingest
}  // namespace grembed
