// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "grembed/error.hpp"
#include "grembed/hope.hpp"
#include "grembed/hybrid.hpp"
#include "grembed/kmeans.hpp"
#include "grembed/metrics.hpp"
#include "grembed/node2vec.hpp"
#include "grembed/pipeline.hpp"
#include "grembed/recommend.hpp"
#include "grembed/svd.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace grembed;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& what) { notes.push_back(what); }
};

std::string num_str(double v, int digits = 4) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

WeightedGraph read_graph(const fs::path& p) {
    std::ifstream in(p);
    return graph::read_edge_list(in, p.string());
}

// Every file under `dir` keyed by relative path; the manifest loses its timings.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir).string();
        std::ifstream in(entry.path(), std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (rel == pipeline::files::manifest) {
            auto j = json::parse(bytes);
            j.erase("timings");
            bytes = j.dump();
        }
        out[rel] = std::move(bytes);
    }
    return out;
}

const fs::path kRoot = fs::temp_directory_path() / "grembed_acceptance";

pipeline::PipelineConfig fixture_config(const fs::path& out, std::uint64_t seed) {
    const fs::path fixture = kRoot / "fixture";
    if (!fs::exists(fixture / "reviews.jsonl")) pipeline::generate_synthetic(pipeline::SyntheticSpec{}, fixture);
    pipeline::PipelineConfig c;
    c.reviews_path = (fixture / "reviews.jsonl").string();
    c.friends_path = (fixture / "friends.jsonl").string();
    c.out_dir = out.string();
    c.seed = seed;
    c.eval_k = {20};
    c.node2vec.threads = 1;
    return c;
}

Outcome formula_fixtures() {
    Outcome o;
    o.check(graph::similarity_weight({"a", "b"}, {"c"}, {"a", "b"}, {"c"}) == 1.0, "identical users weigh 1");
    o.check(graph::similarity_weight({"a"}, {}, {"b"}, {}) == 0.0, "disjoint users weigh 0");
    o.check(graph::similarity_weight({"a", "b"}, {"c"}, {"a"}, {"c", "d"}) == 0.5, "partial overlap weighs 0.5");

    using P = std::vector<std::pair<std::size_t, std::size_t>>;
    o.check(eval::mae(P{{10, 10}}) == 0.0, "mae all hits");
    o.check(eval::mae(P{{10, 0}}) == 1.0, "mae no hits");
    o.check(eval::mae(P{{10, 4}, {20, 5}}) == 0.675, "mae two users");
    o.check(eval::coverage(P{{3, 3}, {7, 7}}) == 100.0, "coverage complete");
    o.check(eval::coverage(P{{4, 8}}) == 50.0, "coverage half");
    o.check(eval::coverage(P{{4, 8}, {0, 10}}) == 25.0, "coverage two users");

    // Ten neighbors on a line; six of them vote R1 twice, R2 once and R3 five times.
    std::vector<UserId> users{"q"};
    num::DenseMatrix pts(11, 1);
    for (int i = 1; i <= 10; ++i) {
        users.push_back("n" + std::to_string(10 + i));
        pts(i, 0) = 0.1 * i;
    }
    const Embedding e(EmbeddingMethod::spectral, users, pts);
    cluster::Clustering one;
    one.k = 1;
    one.centroids = num::DenseMatrix(1, 1);
    one.assignment.assign(11, 0);
    GroundTruth t;
    t.high_rated["n11"] = {"R1", "R3"};
    t.high_rated["n13"] = {"R3"};
    t.high_rated["n15"] = {"R1", "R3"};
    t.high_rated["n16"] = {"R3"};
    t.high_rated["n17"] = {"R2"};
    t.high_rated["n18"] = {"R3"};
    const std::set<UserId> eligible(users.begin(), users.end());
    const auto r = rec::recommend_for_user("q", e, one, t, eligible, {10, 100});
    o.check(r.items == std::vector<ScoredItem>{{"R3", 5}, {"R1", 2}, {"R2", 1}}, "neighbor vote example");
    return o;
}

Outcome numeric_oracles() {
    Outcome o;
    num::Rng rng(2024);
    double worst_value = 0.0, worst_residual = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 11;
        const auto a = testing_support::random_symmetric(n, rng);
        const auto want = oracle::jacobi_eigen(testing_support::to_oracle(a));
        for (const std::size_t limit : {std::size_t{64}, std::size_t{0}}) {
            num::EigenOptions opts;
            opts.dense_limit = limit;
            const auto got = num::symmetric_eigs_smallest(num::SparseMatrix::from_dense(a), n, opts);
            for (std::size_t j = 0; j < n; ++j) worst_value = std::max(worst_value, std::abs(got.values[j] - want.values[j]));
            worst_residual = std::max(worst_residual, testing_support::eigen_residual(a, got));
        }
    }
    o.check(worst_value <= 1e-8, "eigenvalue difference " + num_str(worst_value));
    o.check(worst_residual <= 1e-6, "eigen residual " + num_str(worst_residual));
    o.note("eigen max diff " + num_str(worst_value, 3) + ", residual " + num_str(worst_residual, 3));

    double worst_sv = 0.0, worst_svd_residual = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t rows = 2 + trial % 11, cols = 2 + (trial * 7) % 11;
        const auto m = testing_support::random_dense(rows, cols, rng);
        const auto want = oracle::singular_values(testing_support::to_oracle(m));
        const std::size_t d = std::min(rows, cols);
        for (const std::size_t limit : {std::size_t{512}, std::size_t{0}}) {
            num::SvdOptions opts;
            opts.jacobi_limit = limit;
            opts.eigen.dense_limit = 0;
            const auto got = num::truncated_svd(m, d, opts);
            for (std::size_t j = 0; j < d; ++j) {
                worst_sv = std::max(worst_sv, std::abs(got.s[j] - want[j]));
                const auto mv = num::multiply(m, got.v.column(j));
                double r = 0.0;
                for (std::size_t i = 0; i < rows; ++i) r += std::pow(mv[i] - got.s[j] * got.u(i, j), 2);
                worst_svd_residual = std::max(worst_svd_residual, std::sqrt(r));
            }
        }
    }
    o.check(worst_sv <= 1e-8, "singular value difference " + num_str(worst_sv));
    o.check(worst_svd_residual <= 1e-6, "svd residual " + num_str(worst_svd_residual));
    o.note("svd max diff " + num_str(worst_sv, 3) + ", residual " + num_str(worst_svd_residual, 3));
    return o;
}

Outcome gradient_checks() {
    Outcome o;
    num::Rng rng(31);

    std::vector<double> u(8), pos(8);
    std::vector<std::vector<double>> negs(5, std::vector<double>(8));
    for (auto& x : u) x = rng.uniform(-1, 1);
    for (auto& x : pos) x = rng.uniform(-1, 1);
    for (auto& n : negs)
        for (auto& x : n) x = rng.uniform(-1, 1);
    const std::vector<std::span<const double>> spans(negs.begin(), negs.end());
    std::vector<double> g(8);
    embed::sgns_loss(u, pos, spans, g);
    const auto sgns_fd =
        oracle::numeric_gradient([&](const std::vector<double>& x) { return embed::sgns_loss(x, pos, spans); }, u);
    const double sgns_err = oracle::relative_error(g, sgns_fd);
    o.check(sgns_err <= 1e-5, "sgns gradient " + num_str(sgns_err));

    hybrid::HybridDataset d;
    const std::size_t n = 4, r = 3;
    for (std::size_t i = 0; i < n; ++i) d.users.push_back("u" + std::to_string(i));
    for (std::size_t j = 0; j < r; ++j) d.restaurants.push_back("r" + std::to_string(j));
    d.x.resize(n * 3 * r);
    d.y.resize(n * r);
    for (auto& v : d.x) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
    for (auto& v : d.y) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
    const std::vector<std::size_t> rows{0, 1, 2, 3};

    auto model = hybrid::MlpModel::initialize({3 * r, 4, 4, 4, r}, 5);
    std::vector<double> params = model.parameters();
    for (auto& p : params) p = rng.uniform(-0.5, 1.0);
    model.set_parameters(params);
    std::vector<double> mlp_grad;
    hybrid::mse_loss(model, d, rows, &mlp_grad);
    const auto mlp_fd = oracle::numeric_gradient(
        [&](const std::vector<double>& p) {
            auto copy = model;
            copy.set_parameters(p);
            return hybrid::mse_loss(copy, d, rows);
        },
        params);
    const double mlp_err = oracle::relative_error(mlp_grad, mlp_fd);
    o.check(mlp_err <= 1e-5, "mlp gradient " + num_str(mlp_err));

    const hybrid::BlendWeights alpha{0.4, -0.3, 0.8};
    hybrid::BlendWeights blend_grad{};
    hybrid::blend_loss(d, rows, alpha, &blend_grad);
    const auto blend_fd = oracle::numeric_gradient(
        [&](const std::vector<double>& p) { return hybrid::blend_loss(d, rows, {p[0], p[1], p[2]}); },
        {alpha[0], alpha[1], alpha[2]});
    const double blend_err =
        oracle::relative_error(std::vector<double>(blend_grad.begin(), blend_grad.end()), blend_fd);
    o.check(blend_err <= 1e-5, "blend gradient " + num_str(blend_err));
    o.note("relative errors sgns " + num_str(sgns_err, 2) + ", mlp " + num_str(mlp_err, 2) + ", blend " +
           num_str(blend_err, 2));
    return o;
}

Outcome hope_fidelity() {
    Outcome o;
    const auto g = testing_support::random_graph(30, 0.15, 77);
    const double beta = 0.5 / embed::spectral_radius(g);
    const auto s = embed::katz_matrix(g, beta);

    oracle::Mat w = oracle::zeros(30, 30);
    for (std::size_t i = 0; i < 30; ++i)
        for (const auto& nb : g.neighbors(i)) w[i][nb.node] = nb.weight;
    const auto series = oracle::katz_series(w, beta, 50);
    double worst = 0.0;
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j) worst = std::max(worst, std::abs(s(i, j) - series[i][j]));
    o.check(worst <= 1e-10, "katz elementwise " + num_str(worst));

    embed::HopeOptions opts;
    opts.dim = 16;
    const auto f = embed::hope_factorize(g, opts);
    double err = 0.0;
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j) {
            double approx = 0.0;
            for (std::size_t t = 0; t < 16; ++t) approx += f.svd.u(i, t) * f.svd.s[t] * f.svd.v(j, t);
            err += (s(i, j) - approx) * (s(i, j) - approx);
        }
    const double best = oracle::best_rank_error(series, 16);
    const double gap = std::sqrt(err) - best;
    o.check(std::abs(gap) <= 1e-6, "rank-16 error gap " + num_str(gap));
    o.note("katz diff " + num_str(worst, 3) + ", rank-16 gap " + num_str(gap, 3));
    return o;
}

double coverage_at(const json& section, const std::string& method, std::size_t k) {
    for (const auto& r : section.at(method))
        if (r.at("k").get<std::size_t>() == k) return r.at("coverage_percent").get<double>();
    throw std::runtime_error("no report for " + method + " at k=" + std::to_string(k));
}

Outcome planted_communities() {
    Outcome o;
    const fs::path out = kRoot / "planted";
    fs::remove_all(out);
    const auto c = fixture_config(out, 11);
    pipeline::run_stage(pipeline::Stage::all, c);

    std::ostringstream ks;
    for (const auto m : hybrid::kMethodOrder) {
        const auto k = read_json(out / pipeline::files::elbow(m)).at("k").get<std::size_t>();
        ks << ' ' << to_string(m) << '=' << k;
        o.check(k == 3, "(a) elbow k for " + std::string(to_string(m)) + " is " + std::to_string(k));
    }
    o.note("(a) elbow k:" + ks.str());

    const auto report = read_json(out / pipeline::files::evaluation);
    const double random = coverage_at(report.at("cohort"), "random", 20);
    std::ostringstream cov;
    cov << "random " << num_str(random);
    double best_test = 0.0;
    for (const auto m : hybrid::kMethodOrder) {
        const std::string name(to_string(m));
        const double v = coverage_at(report.at("cohort"), name, 20);
        cov << ", " << name << ' ' << num_str(v);
        o.check(v >= 2.0 * random, "(b) " + name + " coverage " + num_str(v) + " below twice random " + num_str(random));
        best_test = std::max(best_test, coverage_at(report.at("test"), name, 20));
    }
    o.note("(b) cohort coverage@20 %: " + cov.str());

    const double hybrid_test = coverage_at(report.at("test"), "hybrid", 20);
    const double blend_test = coverage_at(report.at("test"), "blend", 20);
    o.check(hybrid_test >= best_test,
            "(c) hybrid test coverage " + num_str(hybrid_test) + " below best individual " + num_str(best_test));
    o.note("(c) test coverage@20 %: hybrid " + num_str(hybrid_test) + ", blend " + num_str(blend_test) +
           ", best individual " + num_str(best_test));
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path out = kRoot / "determinism";
    fs::remove_all(out);
    const auto c = fixture_config(out, 7);
    pipeline::run_stage(pipeline::Stage::all, c);
    const auto first = snapshot(out);
    fs::remove_all(out);
    pipeline::run_stage(pipeline::Stage::all, c);
    const auto second = snapshot(out);
    o.check(first.size() == second.size(), "artifact count differs");
    std::size_t differing = 0;
    for (const auto& [name, bytes] : first) {
        const auto it = second.find(name);
        if (it == second.end() || it->second != bytes) {
            ++differing;
            o.check(false, name + " differs");
        }
    }
    o.note(std::to_string(first.size()) + " artifacts compared, " + std::to_string(differing) + " differ");
    return o;
}

Outcome monotonicity() {
    Outcome o;
    const fs::path out = kRoot / "planted";

    std::map<std::string, std::vector<std::pair<std::size_t, double>>> curves;
    {
        std::ifstream in(out / pipeline::files::sweep);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string method, k, cov;
            std::getline(row, method, ',');
            std::getline(row, k, ',');
            std::getline(row, cov, ',');
            curves[method].emplace_back(std::stoul(k), std::stod(cov));
        }
    }
    o.check(!curves.empty(), "sweep is empty");
    for (auto& [method, curve] : curves) {
        std::sort(curve.begin(), curve.end());
        for (std::size_t i = 1; i < curve.size(); ++i)
            o.check(curve[i].second >= curve[i - 1].second, "coverage drops in k for " + method);
    }
    o.note("coverage sweep checked for " + std::to_string(curves.size()) + " methods");

    std::size_t traces = 0;
    for (const auto m : hybrid::kMethodOrder) {
        std::ifstream in(out / pipeline::files::embedding(m));
        const auto e = embed::read_csv(in, m);
        for (std::size_t k = 2; k <= 10; ++k) {
            cluster::KMeansOptions opts;
            opts.restarts = 1;
            const auto c = cluster::kmeans(e.vectors(), k, opts, k);
            for (std::size_t i = 1; i < c.inertia_trace.size(); ++i)
                o.check(c.inertia_trace[i] <= c.inertia_trace[i - 1],
                        "inertia rises for " + std::string(to_string(m)) + " k=" + std::to_string(k));
            ++traces;
        }
    }
    o.note(std::to_string(traces) + " k-means traces checked");

    const auto g = read_graph(out / pipeline::files::graph);
    const auto corpus = embed::generate_walks(g, {}, 3);
    embed::SgnsParams params;
    params.epochs = 5;
    const auto model = embed::train_sgns(corpus, params, 4);
    std::ostringstream losses;
    for (std::size_t i = 0; i < model.epoch_loss.size(); ++i) {
        losses << (i ? ", " : "") << num_str(model.epoch_loss[i]);
        if (i) o.check(model.epoch_loss[i] <= model.epoch_loss[i - 1], "sgns loss rises at epoch " + std::to_string(i));
    }
    o.note("sgns epoch loss " + losses.str());
    return o;
}

template <typename E>
void expect_error(Outcome& o, const std::string& what, const std::function<void()>& f) {
    try {
        f();
        o.check(false, what + " returned normally");
    } catch (const E&) {
        o.note(what + " raised the expected error");
    } catch (const std::exception& e) {
        o.check(false, what + " raised an unexpected error: " + e.what());
    }
}

Outcome degenerate_inputs() {
    Outcome o;
    RatingsTable ratings;
    ratings.liked["a"] = {"x"};
    ratings.liked["b"] = {"y"};

    expect_error<EmptyResultError>(o, "empty graph", [&] {
        graph::build_weighted_graph(FriendshipList{}, ratings, {"a", "b"}, 0.001);
    });
    expect_error<EmptyResultError>(o, "graph stats of an empty graph", [] { graph::graph_stats(WeightedGraph{}); });

    FriendshipList friends;
    friends.add("a", "b");
    expect_error<EmptyResultError>(o, "zero-similarity friends with epsilon 0", [&] {
        graph::build_weighted_graph(friends, ratings, {"a", "b"}, 0.0);
    });

    const Embedding e(EmbeddingMethod::hope, {"a", "b"}, num::DenseMatrix(2, 1, 1.0));
    cluster::Clustering c;
    c.k = 1;
    c.centroids = num::DenseMatrix(1, 1, 1.0);
    c.assignment = {0, 0};
    expect_error<ColdUserError>(o, "cold user", [&] {
        rec::recommend_for_user("ghost", e, c, GroundTruth::from_liked(ratings), {"a", "b"}, {});
    });

    using P = std::vector<std::pair<std::size_t, std::size_t>>;
    expect_error<ZeroCountError>(o, "mae with N_r = 0", [] { eval::mae(P{{0, 0}}); });
    GroundTruth truth;
    truth.high_rated["a"] = {"x"};
    truth.high_rated["b"] = {"y"};
    const auto report = eval::evaluate_method("m", {{"a", {"x"}}, {"b", {}}}, {"a", "b"}, truth, 5);
    o.check(report.excluded_users == 1, "empty list user is not reported as excluded");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::string name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "formula fixtures", 1.0, formula_fixtures},
        {2, "numeric oracles", 10.0, numeric_oracles},
        {3, "gradient checks", 30.0, gradient_checks},
        {4, "HOPE fidelity", 10.0, hope_fidelity},
        {5, "planted-community end-to-end", 300.0, planted_communities},
        {6, "determinism", 600.0, determinism},
        {7, "monotonicity", 0.0, monotonicity},
        {8, "degenerate inputs", 0.0, degenerate_inputs},
    };
    fs::create_directories(kRoot);
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("uncaught error: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0) o.check(secs < c.budget_seconds, "runtime over " + num_str(c.budget_seconds) + " s");
        failures += o.pass ? 0 : 1;
        std::cout << "criterion " << c.id << " (" << c.name << "): " << (o.pass ? "PASS" : "FAIL") << " ["
                  << std::fixed << std::setprecision(2) << secs << " s]" << std::defaultfloat << '\n';
        for (const auto& n : o.notes) std::cout << "    " << n << '\n';
    }
    std::cout << (criteria.size() - failures) << '/' << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
