#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "grembed/embedding.hpp"
#include "grembed/matrix.hpp"
#include "grembed/recommend.hpp"

namespace grembed::hybrid {

// Axis-1 order of the feature tensor.
inline constexpr std::array<EmbeddingMethod, 3> kMethodOrder = {EmbeddingMethod::hope, EmbeddingMethod::spectral,
                                                                 EmbeddingMethod::node2vec};

/// Supervised fusion data: X is users x 3 x R indicators of which embedding
/// recommended which restaurant, Y is users x R ground-truth indicators. The
/// restaurant axis is the sorted union of the cohort's ground-truth sets.
struct HybridDataset {
    std::vector<UserId> users;
    std::vector<BusinessId> restaurants;
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const noexcept { return users.size(); }
    std::size_t width() const noexcept { return restaurants.size(); }
    std::span<const double> features(std::size_t i) const noexcept {
        return {x.data() + i * 3 * width(), 3 * width()};
    }
    std::span<const double> labels(std::size_t i) const noexcept { return {y.data() + i * width(), width()}; }
    double x_at(std::size_t i, std::size_t e, std::size_t r) const noexcept {
        return x[(i * 3 + e) * width() + r];
    }
};

// recs follows kMethodOrder. `weighted` stores vote weights instead of 0/1.
HybridDataset build_hybrid_dataset(const std::vector<UserId>& cohort,
                                   const std::array<const RecommendationMap*, 3>& recs, const GroundTruth& truth,
                                   bool weighted = false);

// Dense feed-forward network with a rectifier after every layer, output included.
class MlpModel {
public:
    MlpModel() = default;
    // Zero biases; weights uniform in +-sqrt(6 / (fan_in + fan_out)).
    static MlpModel initialize(std::vector<std::size_t> sizes, std::uint64_t seed);

    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    std::size_t layers() const noexcept { return weights_.size(); }
    const num::DenseMatrix& weights(std::size_t l) const { return weights_.at(l); }
    const std::vector<double>& bias(std::size_t l) const { return biases_.at(l); }
    num::DenseMatrix& weights(std::size_t l) { return weights_.at(l); }
    std::vector<double>& bias(std::size_t l) { return biases_.at(l); }

    std::vector<double> forward(std::span<const double> input) const;

    // Flattened as layer by layer: weights row-major (out x in), then bias.
    std::size_t parameter_count() const noexcept;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);

    bool operator==(const MlpModel&) const = default;

private:
    std::vector<std::size_t> sizes_;
    std::vector<num::DenseMatrix> weights_;
    std::vector<std::vector<double>> biases_;
};

// Mean over the selected users and all restaurants of (prediction - label)^2.
// Writes the gradient w.r.t. the flattened parameters when `grad` is non-null.
double mse_loss(const MlpModel& model, const HybridDataset& data, std::span<const std::size_t> rows,
                std::vector<double>* grad = nullptr);

struct TrainOptions {
    double split_ratio = 0.8;
    std::size_t epochs = 40;
    double lr = 1e-4;
    std::vector<std::size_t> hidden = {32, 64, 128};
};

struct TrainResult {
    MlpModel model;
    std::vector<double> train_loss;  // before each epoch's update
    std::vector<double> val_loss;    // after each epoch's update
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
};

/// Seeded shuffle then train/test split, followed by full-batch Adam on MSE.
TrainResult train_mlp(const HybridDataset& data, const TrainOptions& opts, std::uint64_t seed);

// Indices of the top-k scores, descending; ties and excluded entries as documented.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k,
                               std::span<const bool> excluded = {});

/// Top-k restaurant ids by network score (descending, lower index first on
/// ties). Restaurants in `exclude` are skipped.
std::vector<BusinessId> predict_hybrid(const MlpModel& model, std::span<const double> features,
                                       const std::vector<BusinessId>& restaurants, std::size_t k,
                                       const ItemSet& exclude = {});

// Scalar per-embedding weights for score(r) = sum_e alpha_e X[e][r].
using BlendWeights = std::array<double, 3>;

double blend_loss(const HybridDataset& data, std::span<const std::size_t> rows, const BlendWeights& alpha,
                  BlendWeights* grad = nullptr);

// Plain gradient descent from zero. Throws DivergenceError if a weight stops being finite.
BlendWeights fit_linear_blend(const HybridDataset& data, std::span<const std::size_t> rows, std::size_t epochs,
                              double lr);

std::vector<BusinessId> predict_blend(const BlendWeights& alpha, const HybridDataset& data, std::size_t row,
                                      std::size_t k, const ItemSet& exclude = {});

// JSON manifest plus one CSV per weight matrix and bias vector, all in `dir`.
void save_model(const MlpModel& model, const std::filesystem::path& dir, const std::string& stem,
                const nlohmann::json& extra = {});
MlpModel load_model(const std::filesystem::path& manifest);

}  // namespace grembed::hybrid
