#include "grembed/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "grembed/error.hpp"
#include "grembed/hope.hpp"
#include "grembed/hybrid.hpp"
#include "grembed/ingest.hpp"
#include "grembed/kmeans.hpp"
#include "grembed/metrics.hpp"
#include "grembed/node2vec.hpp"
#include "grembed/recommend.hpp"
#include "grembed/rng.hpp"
#include "grembed/social_graph.hpp"
#include "grembed/spectral.hpp"

namespace grembed::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class N, class F>
void node2vec_fields(N& n, F&& f) {
    f("p", n.p);
    f("q", n.q);
    f("walks_per_node", n.walks_per_node);
    f("walk_length", n.walk_length);
    f("window", n.window);
    f("negatives", n.negatives);
    f("epochs", n.epochs);
    f("lr", n.lr);
    f("threads", n.threads);
}

template <class C, class F>
void config_fields(C& c, F&& f) {
    f("reviews", c.reviews_path);
    f("friends", c.friends_path);
    f("out_dir", c.out_dir);
    f("seed", c.seed);
    f("min_reviews", c.min_reviews);
    f("high_stars", c.high_stars);
    f("low_stars", c.low_stars);
    f("epsilon", c.epsilon);
    f("holdout_fraction", c.holdout_fraction);
    f("dim", c.dim);
    f("hope_beta", c.hope_beta);
    f("spectral_strict", c.spectral_strict);
    f("k_min", c.k_min);
    f("k_max", c.k_max);
    f("kmeans_restarts", c.kmeans_restarts);
    f("kmeans_max_iter", c.kmeans_max_iter);
    f("cohort_size", c.cohort_size);
    f("n_neighbors", c.n_neighbors);
    f("eligible_lower", c.eligible_lower);
    f("eligible_upper", c.eligible_upper);
    f("eval_k", c.eval_k);
    f("sweep_k", c.sweep_k);
    f("split_ratio", c.split_ratio);
    f("hybrid_epochs", c.hybrid_epochs);
    f("hybrid_lr", c.hybrid_lr);
    f("hybrid_hidden", c.hybrid_hidden);
    f("hybrid_weighted", c.hybrid_weighted);
    f("blend_epochs", c.blend_epochs);
    f("blend_lr", c.blend_lr);
}

template <class S, class F>
void synthetic_fields(S& s, F&& f) {
    f("communities", s.communities);
    f("users_per_community", s.users_per_community);
    f("restaurants_per_community", s.restaurants_per_community);
    f("intra_like", s.intra_like);
    f("cross_like", s.cross_like);
    f("intra_friend", s.intra_friend);
    f("inter_friend", s.inter_friend);
    f("seed", s.seed);
}

// Reads every known key present in `j`; reports unknown keys and type errors.
template <class T, class Fields>
void read_fields(const json& j, T& target, Fields&& fields, const std::string& prefix,
                 std::vector<std::string>& problems, const std::set<std::string>& nested = {}) {
    if (!j.is_object()) {
        problems.push_back(prefix + ": expected a JSON object");
        return;
    }
    std::set<std::string> known(nested);
    fields(target, [&](const char* key, auto& value) {
        known.insert(key);
        if (!j.contains(key)) return;
        try {
            value = j.at(key).template get<std::decay_t<decltype(value)>>();
        } catch (const json::exception&) {
            problems.push_back(prefix + key + ": wrong type");
        }
    });
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) problems.push_back(prefix + key + ": unknown key");
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::ifstream open_input(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw MissingArtifactError(p.string());
    return in;
}

json read_json(const fs::path& p) {
    auto in = open_input(p);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(p.string(), 0, e.what());
    }
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << '\n';
}

template <class Fn>
void write_file(const fs::path& p, Fn&& fn) {
    std::ofstream out(p);
    if (!out) throw ValidationError("cannot write " + p.string());
    fn(out);
}

void say(const RunOptions& o, const std::string& msg) {
    if (o.log) *o.log << msg << '\n';
}

constexpr std::array<EmbeddingMethod, 3> kAllMethods = {EmbeddingMethod::node2vec, EmbeddingMethod::spectral,
                                                        EmbeddingMethod::hope};

std::vector<EmbeddingMethod> selected_methods(const RunOptions& o) {
    if (o.method) return {*o.method};
    return {kAllMethods.begin(), kAllMethods.end()};
}

std::size_t max_k(const PipelineConfig& c) {
    std::size_t k = 0;
    for (auto v : c.eval_k) k = std::max(k, v);
    for (auto v : c.sweep_k) k = std::max(k, v);
    return k;
}

std::vector<std::size_t> all_k(const PipelineConfig& c) {
    std::set<std::size_t> ks(c.eval_k.begin(), c.eval_k.end());
    ks.insert(c.sweep_k.begin(), c.sweep_k.end());
    return {ks.begin(), ks.end()};
}

// Artifact readers shared by several stages.

RatingsTable load_ratings(const PipelineConfig& c, const fs::path& p) {
    return ingest::ratings_from_json(read_json(p), c.high_stars, c.low_stars);
}

GroundTruth load_truth(const fs::path& p) { return rec::ground_truth_from_json(read_json(p)); }

WeightedGraph load_graph(const fs::path& p) {
    auto in = open_input(p);
    return graph::read_edge_list(in, p.string());
}

FriendshipList load_friendships(const fs::path& p) {
    auto in = open_input(p);
    FriendshipList f;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(p.string(), n, "expected two tab-separated ids");
        f.add(line.substr(0, tab), line.substr(tab + 1));
    }
    return f;
}

Embedding load_embedding(const fs::path& dir, EmbeddingMethod m) {
    const auto p = dir / files::embedding(m);
    auto in = open_input(p);
    return embed::read_csv(in, m, p.string());
}

void write_clustering(const fs::path& dir, EmbeddingMethod m, const cluster::ElbowResult& elbow,
                      const cluster::Clustering& cl, const Embedding& e) {
    write_file(dir / files::clusters(m), [&](std::ostream& out) {
        out << "user_id,cluster\n";
        for (std::size_t i = 0; i < e.size(); ++i) out << e.users()[i] << ',' << cl.assignment[i] << '\n';
    });
    write_file(dir / files::centroids(m), [&](std::ostream& out) { num::write_csv(cl.centroids, out); });
    auto curve = json::array();
    for (const auto& [k, inertia] : elbow.inertia) curve.push_back({k, inertia});
    write_json(dir / files::elbow(m), {{"method", to_string(m)}, {"k", cl.k}, {"inertia", cl.inertia}, {"curve", curve}});
}

cluster::Clustering load_clustering(const fs::path& dir, EmbeddingMethod m, const Embedding& e) {
    cluster::Clustering cl;
    const auto cpath = dir / files::centroids(m);
    {
        auto in = open_input(cpath);
        cl.centroids = num::read_csv(in, cpath.string());
    }
    if (cl.centroids.cols() != e.dim()) throw ValidationError(cpath.string() + ": centroid dimension differs from embedding");
    cl.k = cl.centroids.rows();
    const auto apath = dir / files::clusters(m);
    auto in = open_input(apath);
    std::map<UserId, std::size_t> assigned;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (++n == 1 || line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(apath.string(), n, "expected user_id,cluster");
        try {
            assigned[line.substr(0, comma)] = std::stoul(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError(apath.string(), n, "bad cluster id");
        }
    }
    cl.assignment.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto it = assigned.find(e.users()[i]);
        if (it == assigned.end()) throw ValidationError(apath.string() + ": no cluster for user " + e.users()[i]);
        cl.assignment[i] = it->second;
    }
    return cl;
}

json lists_to_json(const eval::RankedLists& lists) {
    json j = json::object();
    for (const auto& [u, items] : lists) j[u] = items;
    return j;
}

eval::RankedLists lists_from_json(const json& j) {
    eval::RankedLists out;
    for (const auto& [u, items] : j.items()) out.emplace(u, items.get<std::vector<BusinessId>>());
    return out;
}

// Stages.

void run_ingest(const PipelineConfig& c, std::uint64_t seed, const RunOptions& o) {
    if (c.reviews_path.empty() || c.friends_path.empty())
        throw ValidationError("ingest needs both 'reviews' and 'friends' input paths");
    const fs::path dir(c.out_dir);
    const Dataset data = ingest::parse_dataset(c.reviews_path, c.friends_path);
    const auto active = ingest::filter_active_users(data.reviews, data.friendships, c.min_reviews);
    const RatingsTable ratings = ingest::build_ratings_table(data.reviews, active, c.high_stars, c.low_stars);
    const rec::HoldoutSplit split = rec::split_holdout(ratings, c.holdout_fraction, seed);

    write_json(dir / files::ratings, ingest::to_json(ratings));
    write_json(dir / files::visible, ingest::to_json(split.visible));
    write_json(dir / files::ground_truth, rec::to_json(split.held_out));

    std::size_t pairs = 0;
    write_file(dir / files::friendships, [&](std::ostream& out) {
        for (const auto& [a, b] : data.friendships.pairs)
            if (active.contains(a) && active.contains(b)) {
                out << a << '\t' << b << '\n';
                ++pairs;
            }
    });
    std::set<BusinessId> businesses;
    std::set<UserId> users;
    for (const auto& r : data.reviews) {
        users.insert(r.user);
        if (active.contains(r.user)) businesses.insert(r.business);
    }
    write_file(dir / files::businesses, [&](std::ostream& out) {
        for (const auto& b : businesses) out << b << '\n';
    });
    std::size_t held = 0;
    for (const auto& [u, items] : split.held_out.high_rated) held += items.size();
    json summary{{"reviews", data.reviews.size()},   {"users", users.size()},
                 {"active_users", active.size()},    {"businesses", businesses.size()},
                 {"friend_pairs", pairs},            {"held_out_items", held}};
    write_json(dir / files::ingest_summary, summary);
    say(o, "ingest: " + std::to_string(active.size()) + " active users, " + std::to_string(pairs) +
               " friend pairs, " + std::to_string(held) + " held-out items");
}

void run_graph(const PipelineConfig& c, const RunOptions& o) {
    const fs::path dir(c.out_dir);
    const FriendshipList friends = load_friendships(dir / files::friendships);
    const RatingsTable visible = load_ratings(c, dir / files::visible);
    std::set<UserId> active;
    for (const auto& [a, b] : friends.pairs) {
        active.insert(a);
        active.insert(b);
    }
    const WeightedGraph g = graph::build_weighted_graph(friends, visible, active, c.epsilon);
    write_file(dir / files::graph, [&](std::ostream& out) { graph::write_edge_list(g, out); });
    const auto stats = graph::graph_stats(g);
    std::size_t components = 0;
    g.components(&components);
    write_json(dir / files::graph_stats, {{"nodes", stats.nodes},
                                          {"edges", stats.edges},
                                          {"avg_degree", stats.avg_degree},
                                          {"components", components}});
    std::ostringstream msg;
    msg << "graph: " << stats.nodes << " nodes, " << stats.edges << " edges, avg degree " << stats.avg_degree;
    say(o, msg.str());
}

void run_embed(const PipelineConfig& c, std::uint64_t seed, const RunOptions& o) {
    const fs::path dir(c.out_dir);
    const WeightedGraph g = load_graph(dir / files::graph);
    for (const auto m : selected_methods(o)) {
        const std::uint64_t s = num::derive_seed(seed, to_string(m));
        Embedding e;
        switch (m) {
            case EmbeddingMethod::spectral: {
                embed::SpectralOptions opts;
                opts.dim = c.dim;
                opts.strict = c.spectral_strict;
                opts.eigen.seed = s;
                e = embed::spectral_embed(g, opts);
                break;
            }
            case EmbeddingMethod::hope: {
                embed::HopeOptions opts;
                opts.dim = c.dim;
                opts.beta = c.hope_beta;
                opts.eigen.seed = s;
                e = embed::hope_embed(g, opts);
                break;
            }
            case EmbeddingMethod::node2vec: {
                embed::Node2VecParams p;
                p.walk.p = c.node2vec.p;
                p.walk.q = c.node2vec.q;
                p.walk.walks_per_node = c.node2vec.walks_per_node;
                p.walk.walk_length = c.node2vec.walk_length;
                p.sgns.dim = c.dim;
                p.sgns.window = c.node2vec.window;
                p.sgns.negatives = c.node2vec.negatives;
                p.sgns.epochs = c.node2vec.epochs;
                p.sgns.lr = c.node2vec.lr;
                p.threads = c.node2vec.threads ? c.node2vec.threads : std::max(1u, std::thread::hardware_concurrency());
                e = embed::node2vec_embed(g, p, s);
                break;
            }
        }
        write_file(dir / files::embedding(m), [&](std::ostream& out) { embed::write_csv(e, out); });
        say(o, "embed: " + std::string(to_string(m)) + " " + std::to_string(e.size()) + "x" + std::to_string(e.dim()));
    }
}

void run_cluster(const PipelineConfig& c, std::uint64_t seed, const RunOptions& o) {
    const fs::path dir(c.out_dir);
    cluster::KMeansOptions opts;
    opts.max_iter = c.kmeans_max_iter;
    opts.restarts = c.kmeans_restarts;
    for (const auto m : selected_methods(o)) {
        const Embedding e = load_embedding(dir, m);
        const std::uint64_t s = num::derive_seed(seed, to_string(m));
        const auto elbow = cluster::elbow_select_k(e.vectors(), c.k_min, c.k_max, opts, s);
        const auto cl = cluster::kmeans(e.vectors(), elbow.k, opts, num::derive_seed(s, elbow.k));
        write_clustering(dir, m, elbow, cl, e);
        say(o, "cluster: " + std::string(to_string(m)) + " k=" + std::to_string(elbow.k));
    }
}

std::vector<UserId> select_cohort(const PipelineConfig& c, const WeightedGraph& g, const std::set<UserId>& eligible,
                                  const GroundTruth& held_out) {
    std::vector<UserId> cohort;
    for (const auto& u : rec::select_top_users(g, g.size())) {
        if (cohort.size() == c.cohort_size) break;
        if (eligible.contains(u) && !held_out.of(u).empty()) cohort.push_back(u);
    }
    if (cohort.empty()) throw EmptyResultError("recommend: no user qualifies for the evaluation cohort");
    return cohort;
}

void run_recommend(const PipelineConfig& c, const RunOptions& o) {
    const fs::path dir(c.out_dir);
    const WeightedGraph g = load_graph(dir / files::graph);
    const GroundTruth visible = GroundTruth::from_liked(load_ratings(c, dir / files::visible));
    const GroundTruth held_out = load_truth(dir / files::ground_truth);
    const auto eligible = rec::eligible_recommenders(visible, c.eligible_lower, c.eligible_upper);
    const auto cohort = select_cohort(c, g, eligible, held_out);
    write_json(dir / files::cohort, {{"users", cohort}});

    const rec::RecommendParams params{c.n_neighbors, max_k(c)};
    for (const auto m : selected_methods(o)) {
        const Embedding e = load_embedding(dir, m);
        const auto cl = load_clustering(dir, m, e);
        RecommendationMap recs;
        std::size_t empty = 0;
        for (const auto& u : cohort) {
            auto r = rec::recommend_for_user(u, e, cl, visible, eligible, params);
            empty += r.items.empty() ? 1 : 0;
            recs.emplace(u, std::move(r));
        }
        write_json(dir / files::recommendations(m), rec::to_json(recs));
        say(o, "recommend: " + std::string(to_string(m)) + " " + std::to_string(cohort.size()) + " users, " +
                   std::to_string(empty) + " with no candidates");
    }
}

std::vector<UserId> cohort_from(const fs::path& dir) {
    return read_json(dir / files::cohort).at("users").get<std::vector<UserId>>();
}

void run_hybrid(const PipelineConfig& c, std::uint64_t seed, const RunOptions& o) {
    const fs::path dir(c.out_dir);
    const auto cohort = cohort_from(dir);
    const GroundTruth held_out = load_truth(dir / files::ground_truth);
    const GroundTruth visible = GroundTruth::from_liked(load_ratings(c, dir / files::visible));
    std::array<RecommendationMap, 3> recs;
    for (std::size_t e = 0; e < 3; ++e)
        recs[e] = rec::recommendations_from_json(read_json(dir / files::recommendations(hybrid::kMethodOrder[e])));
    const auto data = hybrid::build_hybrid_dataset(cohort, {&recs[0], &recs[1], &recs[2]}, held_out, c.hybrid_weighted);

    hybrid::TrainOptions opts;
    opts.split_ratio = c.split_ratio;
    opts.epochs = c.hybrid_epochs;
    opts.lr = c.hybrid_lr;
    opts.hidden = c.hybrid_hidden;
    const auto trained = hybrid::train_mlp(data, opts, seed);
    const auto alpha = hybrid::fit_linear_blend(data, trained.train_rows, c.blend_epochs, c.blend_lr);

    hybrid::save_model(trained.model, dir, "hybrid_model",
                       {{"seed", seed}, {"epochs", c.hybrid_epochs}, {"lr", c.hybrid_lr}, {"restaurants", data.restaurants}});
    write_file(dir / files::hybrid_loss, [&](std::ostream& out) {
        out << "epoch,train_loss,val_loss\n";
        for (std::size_t i = 0; i < trained.train_loss.size(); ++i)
            out << i + 1 << ',' << num::format_double(trained.train_loss[i]) << ','
                << num::format_double(trained.val_loss[i]) << '\n';
    });
    std::vector<UserId> train_users, test_users;
    for (const auto i : trained.train_rows) train_users.push_back(cohort[i]);
    for (const auto i : trained.test_rows) test_users.push_back(cohort[i]);
    write_json(dir / files::hybrid_split, {{"train", train_users}, {"test", test_users}});

    const std::size_t k = std::min(max_k(c), data.width());
    eval::RankedLists mlp_lists, blend_lists;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& exclude = visible.of(cohort[i]);
        mlp_lists.emplace(cohort[i], hybrid::predict_hybrid(trained.model, data.features(i), data.restaurants, k, exclude));
        blend_lists.emplace(cohort[i], hybrid::predict_blend(alpha, data, i, k, exclude));
    }
    write_json(dir / files::hybrid_predictions, lists_to_json(mlp_lists));
    json blend;
    blend["order"] = {"hope", "spectral", "node2vec"};
    blend["alpha"] = alpha;
    blend["predictions"] = lists_to_json(blend_lists);
    write_json(dir / files::blend, blend);

    std::ostringstream msg;
    msg << "hybrid: X " << data.size() << "x3x" << data.width() << ", train loss "
        << (trained.train_loss.empty() ? 0.0 : trained.train_loss.front()) << " -> "
        << (trained.train_loss.empty() ? 0.0 : trained.train_loss.back());
    say(o, msg.str());
}

std::string fmt(double v, int precision) {
    if (std::isnan(v)) return "n/a";
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

void run_evaluate(const PipelineConfig& c, std::uint64_t seed, const RunOptions& o) {
    const fs::path dir(c.out_dir);
    const auto cohort = cohort_from(dir);
    const GroundTruth held_out = load_truth(dir / files::ground_truth);
    const GroundTruth visible = GroundTruth::from_liked(load_ratings(c, dir / files::visible));
    const json split = read_json(dir / files::hybrid_split);
    const auto train_users = split.at("train").get<std::vector<UserId>>();
    const auto test_users = split.at("test").get<std::vector<UserId>>();

    std::vector<BusinessId> catalog;
    {
        auto in = open_input(dir / files::businesses);
        for (std::string line; std::getline(in, line);)
            if (!line.empty()) catalog.push_back(line);
    }

    // Method name -> ranked lists; insertion order drives the table layout.
    std::vector<std::pair<std::string, eval::RankedLists>> methods;
    for (const auto m : hybrid::kMethodOrder)
        methods.emplace_back(std::string(to_string(m)),
                             eval::ranked_lists(rec::recommendations_from_json(read_json(dir / files::recommendations(m)))));
    methods.emplace_back("random", eval::random_baseline(cohort, catalog, visible, max_k(c), seed));
    methods.emplace_back("hybrid", lists_from_json(read_json(dir / files::hybrid_predictions)));
    methods.emplace_back("blend", lists_from_json(read_json(dir / files::blend).at("predictions")));

    const auto ks = all_k(c);
    json report;
    report["k_values"] = c.eval_k;
    report["cohort_size"] = cohort.size();
    report["train_size"] = train_users.size();
    report["test_size"] = test_users.size();
    std::vector<eval::EvalReport> sweep;
    const std::array<std::pair<const char*, const std::vector<UserId>*>, 3> groups = {
        {{"cohort", &cohort}, {"train", &train_users}, {"test", &test_users}}};
    std::map<std::string, std::map<std::string, std::map<std::size_t, eval::EvalReport>>> table;
    for (const auto& [group, users] : groups) {
        json section = json::object();
        for (const auto& [name, lists] : methods) {
            auto arr = json::array();
            if (users->empty()) {
                section[name] = arr;
                continue;
            }
            for (const auto k : ks) {
                auto r = eval::evaluate_method(name, lists, *users, held_out, k);
                const bool headline = std::find(c.eval_k.begin(), c.eval_k.end(), k) != c.eval_k.end();
                if (headline) arr.push_back(eval::to_json(r, std::string(group) == "cohort"));
                if (std::string(group) == "cohort") sweep.push_back(r);
                if (headline) table[group][name][k] = std::move(r);
            }
            section[name] = arr;
        }
        report[group] = section;
    }
    write_json(dir / files::evaluation, report);
    write_file(dir / files::sweep, [&](std::ostream& out) { eval::write_sweep_csv(sweep, out); });

    std::ostringstream t;
    t << std::left << std::setw(18) << "method";
    for (const auto k : c.eval_k)
        t << std::right << std::setw(14) << ("cov@" + std::to_string(k)) << std::setw(10) << ("mae@" + std::to_string(k));
    t << '\n';
    for (const auto& [group, _] : groups) {
        for (const auto& [name, __] : methods) {
            const auto& row = table[group][name];
            if (row.empty()) continue;
            t << std::left << std::setw(18) << (name + " (" + group + ")");
            for (const auto k : c.eval_k) {
                const auto& r = row.at(k);
                t << std::right << std::setw(13) << fmt(r.coverage_percent, 2) << '%' << std::setw(10) << fmt(r.mae, 4);
            }
            t << '\n';
        }
    }
    write_file(dir / files::table, [&](std::ostream& out) { out << t.str(); });
    say(o, t.str());
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void record_stage(const PipelineConfig& c, Stage s, double seconds) {
    const fs::path path = fs::path(c.out_dir) / files::manifest;
    const std::string hash = config_hash(c);
    json m = json::object();
    if (fs::exists(path)) {
        try {
            std::ifstream in(path);
            m = json::parse(in);
        } catch (const json::exception&) {
            m = json::object();
        }
        if (!m.is_object() || m.value("config_hash", std::string{}) != hash) m = json::object();
    }
    m["config_hash"] = hash;
    m["seed"] = c.seed;
    m["config"] = to_json(c);
    m["stages"][std::string(to_string(s))] = {{"seed", stage_seed(c, to_string(s))}};
    m["timings"][std::string(to_string(s))] = seconds;
    write_json(path, m);
}

}  // namespace

namespace files {
std::string embedding(EmbeddingMethod m) { return "embedding_" + std::string(to_string(m)) + ".csv"; }
std::string clusters(EmbeddingMethod m) { return "clusters_" + std::string(to_string(m)) + ".csv"; }
std::string centroids(EmbeddingMethod m) { return "centroids_" + std::string(to_string(m)) + ".csv"; }
std::string elbow(EmbeddingMethod m) { return "elbow_" + std::string(to_string(m)) + ".json"; }
std::string recommendations(EmbeddingMethod m) { return "recommendations_" + std::string(to_string(m)) + ".json"; }
}  // namespace files

json to_json(const PipelineConfig& c) {
    json j = json::object();
    config_fields(c, [&](const char* key, const auto& v) { j[key] = v; });
    json n = json::object();
    node2vec_fields(c.node2vec, [&](const char* key, const auto& v) { n[key] = v; });
    j["node2vec"] = n;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    std::vector<std::string> problems;
    read_fields(j, c, [](auto& t, auto&& f) { config_fields(t, f); }, "", problems, {"node2vec"});
    if (j.is_object() && j.contains("node2vec"))
        read_fields(j.at("node2vec"), c.node2vec, [](auto& t, auto&& f) { node2vec_fields(t, f); }, "node2vec.",
                    problems);
    if (!problems.empty()) throw ValidationError("invalid config: " + join(problems, "; "));
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    auto in = std::ifstream(path);
    if (!in) throw MissingArtifactError(path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::vector<std::string> validate(const PipelineConfig& c) {
    std::vector<std::string> v;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) v.push_back(what);
    };
    need(!c.out_dir.empty(), "out_dir must not be empty");
    need(c.min_reviews >= 1, "min_reviews must be >= 1");
    need(c.low_stars < c.high_stars, "low_stars must be below high_stars");
    need(c.low_stars >= 1 && c.high_stars <= 5, "star thresholds must lie in [1, 5]");
    need(c.epsilon >= 0.0 && c.epsilon <= 1.0, "epsilon must lie in [0, 1]");
    need(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0, "holdout_fraction must lie in (0, 1)");
    need(c.dim >= 1, "dim must be >= 1");
    need(c.node2vec.p > 0.0 && c.node2vec.q > 0.0, "node2vec.p and node2vec.q must be positive");
    need(c.node2vec.walks_per_node >= 1, "node2vec.walks_per_node must be >= 1");
    need(c.node2vec.walk_length >= 2, "node2vec.walk_length must be >= 2");
    need(c.node2vec.window >= 1, "node2vec.window must be >= 1");
    need(c.node2vec.lr > 0.0, "node2vec.lr must be positive");
    need(c.hope_beta >= 0.0, "hope_beta must be >= 0");
    need(c.k_min >= 2 && c.k_max > c.k_min, "k range must satisfy 2 <= k_min < k_max");
    need(c.kmeans_restarts >= 1, "kmeans_restarts must be >= 1");
    need(c.kmeans_max_iter >= 1, "kmeans_max_iter must be >= 1");
    need(c.cohort_size >= 1, "cohort_size must be >= 1");
    need(c.n_neighbors >= 1, "n_neighbors must be >= 1");
    need(c.eligible_lower >= 1 && c.eligible_lower <= c.eligible_upper,
         "eligibility bounds must satisfy 1 <= eligible_lower <= eligible_upper");
    need(!c.eval_k.empty(), "eval_k must not be empty");
    need(std::all_of(c.eval_k.begin(), c.eval_k.end(), [](auto k) { return k >= 1; }) &&
             std::all_of(c.sweep_k.begin(), c.sweep_k.end(), [](auto k) { return k >= 1; }),
         "recommendation counts must be >= 1");
    need(c.split_ratio > 0.0 && c.split_ratio < 1.0, "split_ratio must lie in (0, 1)");
    need(c.hybrid_lr > 0.0, "hybrid_lr must be positive");
    need(std::all_of(c.hybrid_hidden.begin(), c.hybrid_hidden.end(), [](auto n) { return n >= 1; }),
         "hybrid_hidden sizes must be >= 1");
    need(c.blend_lr > 0.0, "blend_lr must be positive");
    return v;
}

void require_valid(const PipelineConfig& c) {
    const auto v = validate(c);
    if (!v.empty()) throw ValidationError("invalid config: " + join(v, "; "));
}

std::string config_hash(const PipelineConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(c).dump())));
    return buf;
}

std::uint64_t stage_seed(const PipelineConfig& c, std::string_view stage) { return num::derive_seed(c.seed, stage); }

Stage parse_stage(std::string_view name) {
    static const std::map<std::string_view, Stage> names = {
        {"ingest", Stage::ingest},       {"graph", Stage::graph},   {"embed", Stage::embed},
        {"cluster", Stage::cluster},     {"recommend", Stage::recommend}, {"hybrid", Stage::hybrid},
        {"evaluate", Stage::evaluate},   {"all", Stage::all}};
    const auto it = names.find(name);
    if (it == names.end()) throw ValidationError("unknown stage '" + std::string(name) + "'");
    return it->second;
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::graph: return "graph";
        case Stage::embed: return "embed";
        case Stage::cluster: return "cluster";
        case Stage::recommend: return "recommend";
        case Stage::hybrid: return "hybrid";
        case Stage::evaluate: return "evaluate";
        case Stage::all: return "all";
    }
    return "?";
}

void run_stage(Stage stage, const PipelineConfig& c, const RunOptions& o) {
    require_valid(c);
    if (stage == Stage::all) {
        if (o.method) throw ValidationError("--method cannot be combined with the full pipeline");
        for (const Stage s : {Stage::ingest, Stage::graph, Stage::embed, Stage::cluster, Stage::recommend,
                              Stage::hybrid, Stage::evaluate})
            run_stage(s, c, o);
        return;
    }
    if ((stage == Stage::hybrid || stage == Stage::evaluate || stage == Stage::ingest || stage == Stage::graph) &&
        o.method)
        throw ValidationError("--method only applies to embed, cluster and recommend");
    fs::create_directories(c.out_dir);
    const std::uint64_t seed = stage_seed(c, to_string(stage));
    const auto start = std::chrono::steady_clock::now();
    switch (stage) {
        case Stage::ingest: run_ingest(c, seed, o); break;
        case Stage::graph: run_graph(c, o); break;
        case Stage::embed: run_embed(c, seed, o); break;
        case Stage::cluster: run_cluster(c, seed, o); break;
        case Stage::recommend: run_recommend(c, o); break;
        case Stage::hybrid: run_hybrid(c, seed, o); break;
        case Stage::evaluate: run_evaluate(c, seed, o); break;
        case Stage::all: break;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record_stage(c, stage, secs);
}

json to_json(const SyntheticSpec& s) {
    json j = json::object();
    synthetic_fields(s, [&](const char* key, const auto& v) { j[key] = v; });
    return j;
}

SyntheticSpec synthetic_from_json(const json& j) {
    SyntheticSpec s;
    std::vector<std::string> problems;
    read_fields(j, s, [](auto& t, auto&& f) { synthetic_fields(t, f); }, "", problems);
    if (!problems.empty()) throw ValidationError("invalid synthetic spec: " + join(problems, "; "));
    return s;
}

std::vector<std::string> validate(const SyntheticSpec& s) {
    std::vector<std::string> v;
    auto prob = [&](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) v.push_back(std::string(name) + " must lie in [0, 1]");
    };
    prob(s.intra_like, "intra_like");
    prob(s.cross_like, "cross_like");
    prob(s.intra_friend, "intra_friend");
    prob(s.inter_friend, "inter_friend");
    if (s.communities < 1) v.push_back("communities must be >= 1");
    if (s.users_per_community < 1) v.push_back("users_per_community must be >= 1");
    if (s.restaurants_per_community < 1) v.push_back("restaurants_per_community must be >= 1");
    if (!(s.intra_like > s.cross_like)) v.push_back("intra_like must exceed cross_like");
    if (!(s.intra_friend > s.inter_friend)) v.push_back("intra_friend must exceed inter_friend");
    return v;
}

SyntheticFiles generate_synthetic(const SyntheticSpec& spec, const fs::path& dir) {
    if (const auto v = validate(spec); !v.empty()) throw ValidationError("invalid synthetic spec: " + join(v, "; "));
    fs::create_directories(dir);
    const std::size_t n_users = spec.communities * spec.users_per_community;
    const std::size_t n_items = spec.communities * spec.restaurants_per_community;
    auto id = [](char prefix, std::size_t i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%c%05zu", prefix, i);
        return std::string(buf);
    };

    num::Rng rng(spec.seed);
    SyntheticFiles out{dir / "reviews.jsonl", dir / "friends.jsonl", dir / "communities.csv"};
    {
        std::ofstream reviews(out.reviews);
        std::size_t review_no = 0;
        for (std::size_t u = 0; u < n_users; ++u) {
            const std::size_t cu = u / spec.users_per_community;
            for (std::size_t r = 0; r < n_items; ++r) {
                const bool own = r / spec.restaurants_per_community == cu;
                if (rng.uniform() >= (own ? spec.intra_like : spec.cross_like)) continue;
                json line{{"review_id", id('v', review_no++)},
                          {"user_id", id('u', u)},
                          {"business_id", id('r', r)},
                          {"stars", own ? 5 : 1}};
                reviews << line.dump() << '\n';
            }
        }
    }
    std::vector<std::vector<std::string>> friends(n_users);
    for (std::size_t a = 0; a < n_users; ++a)
        for (std::size_t b = a + 1; b < n_users; ++b) {
            const bool same = a / spec.users_per_community == b / spec.users_per_community;
            if (rng.uniform() < (same ? spec.intra_friend : spec.inter_friend)) {
                friends[a].push_back(id('u', b));
                friends[b].push_back(id('u', a));
            }
        }
    {
        std::ofstream f(out.friends);
        for (std::size_t u = 0; u < n_users; ++u) {
            std::sort(friends[u].begin(), friends[u].end());
            f << json{{"user_id", id('u', u)}, {"friends", friends[u]}}.dump() << '\n';
        }
    }
    {
        std::ofstream cfile(out.communities);
        cfile << "user_id,community\n";
        for (std::size_t u = 0; u < n_users; ++u) cfile << id('u', u) << ',' << u / spec.users_per_community << '\n';
    }
    return out;
}

}  // namespace grembed::pipeline
