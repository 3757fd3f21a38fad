#include "grembed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "grembed/error.hpp"
#include "grembed/matrix.hpp"
#include "grembed/rng.hpp"

namespace grembed::eval {

double mae(std::span<const std::pair<std::size_t, std::size_t>> nr_nhit) {
    if (nr_nhit.empty()) throw ZeroCountError("mae: no users");
    double sum = 0.0;
    for (const auto& [nr, nhit] : nr_nhit) {
        if (nr == 0) throw ZeroCountError("mae: user with zero recommendations");
        if (nhit > nr) throw ValidationError("mae: hits exceed recommendations");
        sum += static_cast<double>(nr - nhit) / static_cast<double>(nr);
    }
    return sum / static_cast<double>(nr_nhit.size());
}

double coverage(std::span<const std::pair<std::size_t, std::size_t>> nhit_nu) {
    if (nhit_nu.empty()) throw ZeroCountError("coverage: no users");
    double sum = 0.0;
    for (const auto& [nhit, nu] : nhit_nu) {
        if (nu == 0) throw ZeroCountError("coverage: user with no rated items");
        if (nhit > nu) throw ValidationError("coverage: hits exceed rated items");
        sum += static_cast<double>(nhit) / static_cast<double>(nu);
    }
    return 100.0 * sum / static_cast<double>(nhit_nu.size());
}

RankedLists ranked_lists(const RecommendationMap& recs) {
    RankedLists out;
    for (const auto& [u, r] : recs) out.emplace(u, r.ids());
    return out;
}

EvalReport evaluate_method(const std::string& method, const RankedLists& recs, const std::vector<UserId>& users,
                           const GroundTruth& truth, std::size_t k) {
    EvalReport report;
    report.method = method;
    report.k = k;
    std::vector<std::pair<std::size_t, std::size_t>> for_mae;
    std::vector<std::pair<std::size_t, std::size_t>> for_cov;
    static const std::vector<BusinessId> kEmpty;
    for (const auto& u : users) {
        const auto& t = truth.of(u);
        if (t.empty()) throw ZeroCountError("evaluate: user " + u + " has an empty ground truth");
        const auto it = recs.find(u);
        const auto& list = it == recs.end() ? kEmpty : it->second;
        UserRow row{u, std::min(k, list.size()), 0, t.size()};
        for (std::size_t i = 0; i < row.n_r; ++i) row.n_hit += t.contains(list[i]) ? 1 : 0;
        if (row.n_r == 0)
            ++report.excluded_users;
        else
            for_mae.emplace_back(row.n_r, row.n_hit);
        for_cov.emplace_back(row.n_hit, row.n_u);
        report.rows.push_back(std::move(row));
    }
    report.coverage_percent = coverage(for_cov);
    report.mae = for_mae.empty() ? std::numeric_limits<double>::quiet_NaN() : mae(for_mae);
    return report;
}

std::vector<EvalReport> sweep_recommendation_count(const std::string& method, const RankedLists& recs,
                                                   const std::vector<UserId>& users, const GroundTruth& truth,
                                                   std::span<const std::size_t> k_values) {
    std::vector<EvalReport> out;
    for (const auto k : k_values) out.push_back(evaluate_method(method, recs, users, truth, k));
    return out;
}

void write_sweep_csv(std::span<const EvalReport> reports, std::ostream& out) {
    out << "method,k,coverage_percent,mae\n";
    for (const auto& r : reports)
        out << r.method << ',' << r.k << ',' << num::format_double(r.coverage_percent) << ','
            << (std::isnan(r.mae) ? std::string("nan") : num::format_double(r.mae)) << '\n';
}

nlohmann::json to_json(const EvalReport& report, bool with_rows) {
    nlohmann::json j;
    j["method"] = report.method;
    j["k"] = report.k;
    j["coverage_percent"] = report.coverage_percent;
    j["mae"] = std::isnan(report.mae) ? nlohmann::json(nullptr) : nlohmann::json(report.mae);
    j["excluded_users"] = report.excluded_users;
    j["users"] = report.rows.size();
    if (with_rows) {
        auto rows = nlohmann::json::array();
        for (const auto& r : report.rows)
            rows.push_back({{"user", r.user}, {"n_r", r.n_r}, {"n_hit", r.n_hit}, {"n_u", r.n_u}});
        j["rows"] = rows;
    }
    return j;
}

RankedLists random_baseline(const std::vector<UserId>& users, const std::vector<BusinessId>& catalog,
                            const GroundTruth& excluded, std::size_t k, std::uint64_t seed) {
    RankedLists out;
    for (const auto& u : users) {
        const auto& skip = excluded.of(u);
        std::vector<BusinessId> pool;
        for (const auto& b : catalog)
            if (!skip.contains(b)) pool.push_back(b);
        num::Rng rng(num::derive_seed(seed, std::string_view(u)));
        rng.shuffle(std::span<BusinessId>(pool));
        if (pool.size() > k) pool.resize(k);
        out.emplace(u, std::move(pool));
    }
    return out;
}

}  // namespace grembed::eval
