#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grembed/recommend.hpp"

namespace grembed::eval {

// Mean of |N_r - N_hit| / N_r. Throws ZeroCountError when some N_r is zero.
double mae(std::span<const std::pair<std::size_t, std::size_t>> nr_nhit);

// Mean of N_hit / N_u, as a percentage. Throws ZeroCountError when some N_u is zero.
double coverage(std::span<const std::pair<std::size_t, std::size_t>> nhit_nu);

struct UserRow {
    UserId user;
    std::size_t n_r = 0;
    std::size_t n_hit = 0;
    std::size_t n_u = 0;

    bool operator==(const UserRow&) const = default;
};

// Users with an empty list stay in the coverage mean with zero hits but are
// left out of the MAE and counted in excluded_users. MAE is NaN when every
// user is excluded.
struct EvalReport {
    std::string method;
    std::size_t k = 0;
    double coverage_percent = 0.0;
    double mae = 0.0;
    std::size_t excluded_users = 0;
    std::vector<UserRow> rows;
};

// Ranked item lists per user, best first.
using RankedLists = std::map<UserId, std::vector<BusinessId>>;

RankedLists ranked_lists(const RecommendationMap& recs);

EvalReport evaluate_method(const std::string& method, const RankedLists& recs, const std::vector<UserId>& users,
                           const GroundTruth& truth, std::size_t k);

std::vector<EvalReport> sweep_recommendation_count(const std::string& method, const RankedLists& recs,
                                                   const std::vector<UserId>& users, const GroundTruth& truth,
                                                   std::span<const std::size_t> k_values);

void write_sweep_csv(std::span<const EvalReport> reports, std::ostream& out);
nlohmann::json to_json(const EvalReport& report, bool with_rows = true);

/// Uniformly drawn items for each user, skipping anything in their
/// excluded set; used as a chance-level reference.
RankedLists random_baseline(const std::vector<UserId>& users, const std::vector<BusinessId>& catalog,
                            const GroundTruth& excluded, std::size_t k, std::uint64_t seed);

}  // namespace grembed::eval
