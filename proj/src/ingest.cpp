#include "grembed/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

#include "grembed/error.hpp"

namespace grembed {

void FriendshipList::add(const UserId& a, const UserId& b) {
    if (a == b) return;
    pairs.emplace(std::min(a, b), std::max(a, b));
}

bool FriendshipList::contains(const UserId& a, const UserId& b) const {
    return pairs.contains({std::min(a, b), std::max(a, b)});
}

namespace {

const ItemSet kEmpty;

const nlohmann::json& require(const nlohmann::json& obj, const char* field, const std::string& source,
                              std::size_t line) {
    const auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) throw MissingFieldError(source, line, field);
    return *it;
}

std::string require_string(const nlohmann::json& obj, const char* field, const std::string& source,
                           std::size_t line) {
    const auto& v = require(obj, field, source, line);
    if (!v.is_string()) throw ParseError(source, line, std::string("field '") + field + "' must be a string");
    return v.get<std::string>();
}

template <typename Fn>
std::size_t for_each_record(std::istream& in, const std::string& source, Fn&& fn) {
    std::string text;
    std::size_t line = 0;
    std::size_t records = 0;
    while (std::getline(in, text)) {
        ++line;
        if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(source, line, std::string("malformed JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(source, line, "record must be a JSON object");
        fn(obj, line);
        ++records;
    }
    if (records == 0) throw EmptyResultError(source + ": empty input");
    return records;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

const ItemSet& RatingsTable::liked_by(const UserId& u) const {
    const auto it = liked.find(u);
    return it == liked.end() ? kEmpty : it->second;
}

const ItemSet& RatingsTable::disliked_by(const UserId& u) const {
    const auto it = disliked.find(u);
    return it == disliked.end() ? kEmpty : it->second;
}

namespace ingest {

std::vector<Review> deduplicate(std::vector<Review> reviews) {
    std::sort(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
        if (a.user != b.user) return a.user < b.user;
        if (a.business != b.business) return a.business < b.business;
        return a.stars > b.stars;
    });
    const auto last = std::unique(reviews.begin(), reviews.end(), [](const Review& a, const Review& b) {
        return a.user == b.user && a.business == b.business;
    });
    reviews.erase(last, reviews.end());
    return reviews;
}

std::vector<Review> parse_reviews(std::istream& in, const std::string& source) {
    std::vector<Review> out;
    for_each_record(in, source, [&](const nlohmann::json& obj, std::size_t line) {
        Review r;
        r.user = require_string(obj, "user_id", source, line);
        r.business = require_string(obj, "business_id", source, line);
        const auto& stars = require(obj, "stars", source, line);
        if (!stars.is_number()) throw ParseError(source, line, "field 'stars' must be a number");
        const double s = stars.get<double>();
        if (s != std::floor(s) || s < 1 || s > 5) throw ParseError(source, line, "stars must be an integer in 1..5");
        r.stars = static_cast<int>(s);
        out.push_back(std::move(r));
    });
    return deduplicate(std::move(out));
}

FriendshipList parse_friendships(std::istream& in, const std::string& source) {
    FriendshipList out;
    for_each_record(in, source, [&](const nlohmann::json& obj, std::size_t line) {
        const UserId user = require_string(obj, "user_id", source, line);
        const auto& friends = require(obj, "friends", source, line);
        if (friends.is_array()) {
            for (const auto& f : friends) {
                if (!f.is_string()) throw ParseError(source, line, "friend ids must be strings");
                out.add(user, f.get<std::string>());
            }
        } else if (friends.is_string()) {
            const std::string text = friends.get<std::string>();
            std::string_view rest(text);
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                const std::string id = trim(rest.substr(0, comma));
                if (!id.empty() && id != "None") out.add(user, id);
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
        } else {
            throw ParseError(source, line, "field 'friends' must be an array or a string");
        }
    });
    return out;
}

Dataset parse_dataset(const std::filesystem::path& review_path, const std::filesystem::path& friends_path) {
    std::ifstream reviews(review_path);
    if (!reviews) throw MissingArtifactError(review_path.string());
    std::ifstream friends(friends_path);
    if (!friends) throw MissingArtifactError(friends_path.string());
    Dataset d;
    d.reviews = parse_reviews(reviews, review_path.string());
    d.friendships = parse_friendships(friends, friends_path.string());
    return d;
}

std::set<UserId> filter_active_users(const std::vector<Review>& reviews, const FriendshipList& friendships,
                                     int min_reviews) {
    if (min_reviews < 1) throw ValidationError("filter_active_users: min_reviews must be >= 1");
    std::map<UserId, int> counts;
    for (const auto& r : deduplicate(reviews)) ++counts[r.user];
    auto busy = [&](const UserId& u) {
        const auto it = counts.find(u);
        return it != counts.end() && it->second >= min_reviews;
    };
    std::set<UserId> out;
    for (const auto& [a, b] : friendships.pairs) {
        if (busy(a) && busy(b)) {
            out.insert(a);
            out.insert(b);
        }
    }
    if (out.empty())
        throw EmptyResultError("no active users: nobody has " + std::to_string(min_reviews) +
                               " reviews and an equally active friend");
    return out;
}

RatingsTable build_ratings_table(const std::vector<Review>& reviews, const std::set<UserId>& users,
                                 int high_threshold, int low_threshold) {
    if (low_threshold >= high_threshold)
        throw ValidationError("build_ratings_table: low threshold must be below high threshold");
    RatingsTable t;
    t.high_threshold = high_threshold;
    t.low_threshold = low_threshold;
    for (const auto& r : deduplicate(reviews)) {
        if (!users.contains(r.user)) continue;
        if (r.stars >= high_threshold)
            t.liked[r.user].insert(r.business);
        else if (r.stars <= low_threshold)
            t.disliked[r.user].insert(r.business);
    }
    return t;
}

nlohmann::json to_json(const RatingsTable& table) {
    nlohmann::json users = nlohmann::json::object();
    std::set<UserId> ids;
    for (const auto& [u, _] : table.liked) ids.insert(u);
    for (const auto& [u, _] : table.disliked) ids.insert(u);
    for (const auto& u : ids) {
        const auto& l = table.liked_by(u);
        const auto& d = table.disliked_by(u);
        users[u] = {{"liked", std::vector<std::string>(l.begin(), l.end())},
                    {"disliked", std::vector<std::string>(d.begin(), d.end())}};
    }
    return users;
}

RatingsTable ratings_from_json(const nlohmann::json& j, int high_threshold, int low_threshold) {
    RatingsTable t;
    t.high_threshold = high_threshold;
    t.low_threshold = low_threshold;
    for (const auto& [u, sets] : j.items()) {
        const auto liked = sets.at("liked").get<std::vector<std::string>>();
        const auto disliked = sets.at("disliked").get<std::vector<std::string>>();
        if (!liked.empty()) t.liked[u] = ItemSet(liked.begin(), liked.end());
        if (!disliked.empty()) t.disliked[u] = ItemSet(disliked.begin(), disliked.end());
    }
    return t;
}

}  // namespace ingest
}  // namespace grembed
