#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "grembed/embedding.hpp"

namespace grembed::pipeline {

struct Node2VecConfig {
    double p = 1.0;
    double q = 1.0;
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 80;
    std::size_t window = 10;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double lr = 0.025;
    unsigned threads = 0;  // 0 = hardware concurrency

    bool operator==(const Node2VecConfig&) const = default;
};

struct PipelineConfig {
    std::string reviews_path;
    std::string friends_path;
    std::string out_dir = "out";
    std::uint64_t seed = 42;

    int min_reviews = 10;
    int high_stars = 4;
    int low_stars = 2;
    double epsilon = 0.001;
    double holdout_fraction = 0.25;

    std::size_t dim = 25;
    Node2VecConfig node2vec{};
    double hope_beta = 0.0;  // 0 = half the inverse spectral radius
    bool spectral_strict = false;

    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::size_t kmeans_restarts = 10;
    std::size_t kmeans_max_iter = 300;

    std::size_t cohort_size = 100;
    std::size_t n_neighbors = 10;
    std::size_t eligible_lower = 5;
    std::size_t eligible_upper = 50;
    std::vector<std::size_t> eval_k = {100, 200};
    std::vector<std::size_t> sweep_k = {10, 20, 50, 100, 150, 200};

    double split_ratio = 0.8;
    std::size_t hybrid_epochs = 40;
    double hybrid_lr = 1e-4;
    std::vector<std::size_t> hybrid_hidden = {32, 64, 128};
    bool hybrid_weighted = false;
    std::size_t blend_epochs = 200;
    double blend_lr = 0.5;

    bool operator==(const PipelineConfig&) const = default;
};

nlohmann::json to_json(const PipelineConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Every violated constraint, empty when the config is usable.
std::vector<std::string> validate(const PipelineConfig& c);
void require_valid(const PipelineConfig& c);

// 64-bit FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const PipelineConfig& c);
std::uint64_t stage_seed(const PipelineConfig& c, std::string_view stage);

enum class Stage { ingest, graph, embed, cluster, recommend, hybrid, evaluate, all };
Stage parse_stage(std::string_view name);
std::string_view to_string(Stage s) noexcept;

// Artifact names inside the output directory.
namespace files {
inline constexpr const char* ratings = "ratings.json";
inline constexpr const char* visible = "ratings_visible.json";
inline constexpr const char* ground_truth = "ground_truth.json";
inline constexpr const char* friendships = "friendships.tsv";
inline constexpr const char* businesses = "businesses.txt";
inline constexpr const char* ingest_summary = "ingest_summary.json";
inline constexpr const char* graph = "graph.tsv";
inline constexpr const char* graph_stats = "graph_stats.json";
inline constexpr const char* cohort = "cohort.json";
inline constexpr const char* hybrid_model = "hybrid_model.json";
inline constexpr const char* hybrid_loss = "hybrid_loss.csv";
inline constexpr const char* hybrid_split = "hybrid_split.json";
inline constexpr const char* hybrid_predictions = "hybrid_predictions.json";
inline constexpr const char* blend = "blend.json";
inline constexpr const char* evaluation = "evaluation.json";
inline constexpr const char* sweep = "sweep.csv";
inline constexpr const char* table = "table.txt";
inline constexpr const char* manifest = "manifest.json";

std::string embedding(EmbeddingMethod m);
std::string clusters(EmbeddingMethod m);
std::string centroids(EmbeddingMethod m);
std::string elbow(EmbeddingMethod m);
std::string recommendations(EmbeddingMethod m);
}  // namespace files

struct RunOptions {
    // Restricts embed, cluster and recommend to one method.
    std::optional<EmbeddingMethod> method;
    std::ostream* log = nullptr;
};

/// Runs one stage (or the whole chain) reading and writing artifacts in
/// config.out_dir, then records its wall time in the manifest. Throws
/// MissingArtifactError naming the first absent input.
void run_stage(Stage stage, const PipelineConfig& config, const RunOptions& opts = {});

// Planted-community generator in the ingest input format.
struct SyntheticSpec {
    std::size_t communities = 3;
    std::size_t users_per_community = 100;
    std::size_t restaurants_per_community = 40;
    double intra_like = 0.6;
    double cross_like = 0.02;
    double intra_friend = 0.2;
    double inter_friend = 0.005;
    std::uint64_t seed = 11;

    bool operator==(const SyntheticSpec&) const = default;
};

nlohmann::json to_json(const SyntheticSpec& s);
SyntheticSpec synthetic_from_json(const nlohmann::json& j);
std::vector<std::string> validate(const SyntheticSpec& s);

struct SyntheticFiles {
    std::filesystem::path reviews;
    std::filesystem::path friends;
    std::filesystem::path communities;
};

/// Users like a restaurant of their own community with probability
/// intra_like (5 stars) and review one of another community with
/// probability cross_like (1 star). Friendships are Bernoulli draws with
/// intra_friend / inter_friend. Community labels go to communities.csv.
SyntheticFiles generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace grembed::pipeline
