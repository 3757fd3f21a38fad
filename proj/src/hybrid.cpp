#include "grembed/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "grembed/adam.hpp"
#include "grembed/error.hpp"
#include "grembed/rng.hpp"

namespace grembed::hybrid {

HybridDataset build_hybrid_dataset(const std::vector<UserId>& cohort,
                                   const std::array<const RecommendationMap*, 3>& recs, const GroundTruth& truth,
                                   bool weighted) {
    HybridDataset d;
    d.users = cohort;
    ItemSet universe;
    for (const auto& u : cohort) {
        const auto& t = truth.of(u);
        if (t.empty()) throw ValidationError("hybrid dataset: user " + u + " has no ground truth");
        universe.insert(t.begin(), t.end());
    }
    d.restaurants.assign(universe.begin(), universe.end());
    const std::size_t r_count = d.restaurants.size();
    std::map<BusinessId, std::size_t> column;
    for (std::size_t r = 0; r < r_count; ++r) column.emplace(d.restaurants[r], r);

    d.x.assign(cohort.size() * 3 * r_count, 0.0);
    d.y.assign(cohort.size() * r_count, 0.0);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const UserId& u = cohort[i];
        for (const auto& item : truth.of(u)) d.y[i * r_count + column.at(item)] = 1.0;
        for (std::size_t e = 0; e < 3; ++e) {
            const auto it = recs[e]->find(u);
            if (it == recs[e]->end())
                throw ValidationError("hybrid dataset: no " + std::string(to_string(kMethodOrder[e])) +
                                      " recommendations for user " + u);
            for (const auto& s : it->second.items) {
                const auto col = column.find(s.item);
                if (col == column.end()) continue;
                d.x[(i * 3 + e) * r_count + col->second] = weighted ? static_cast<double>(s.weight) : 1.0;
            }
        }
    }
    return d;
}

MlpModel MlpModel::initialize(std::vector<std::size_t> sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw ValidationError("mlp: need at least input and output sizes");
    MlpModel m;
    m.sizes_ = std::move(sizes);
    num::Rng rng(seed);
    for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
        const std::size_t in = m.sizes_[l];
        const std::size_t out = m.sizes_[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        num::DenseMatrix w(out, in);
        for (auto& v : w.data()) v = rng.uniform(-limit, limit);
        m.weights_.push_back(std::move(w));
        m.biases_.emplace_back(out, 0.0);
    }
    return m;
}

std::vector<double> MlpModel::forward(std::span<const double> input) const {
    if (input.size() != sizes_.front()) throw ValidationError("mlp: input size mismatch");
    std::vector<double> a(input.begin(), input.end());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        std::vector<double> z = num::multiply(weights_[l], a);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::max(0.0, z[j] + biases_[l][j]);
        a = std::move(z);
    }
    return a;
}

std::size_t MlpModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].data().size() + biases_[l].size();
    return n;
}

std::vector<double> MlpModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        flat.insert(flat.end(), weights_[l].data().begin(), weights_[l].data().end());
        flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
    }
    return flat;
}

void MlpModel::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw ValidationError("mlp: parameter vector has the wrong length");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        auto w = weights_[l].data();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.begin());
        pos += w.size();
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), biases_[l].size(), biases_[l].begin());
        pos += biases_[l].size();
    }
}

double mse_loss(const MlpModel& model, const HybridDataset& data, std::span<const std::size_t> rows,
                std::vector<double>* grad) {
    if (rows.empty()) throw ValidationError("mse_loss: no rows selected");
    const std::size_t layers = model.layers();
    const std::size_t width = data.width();
    const double scale = 1.0 / static_cast<double>(rows.size() * width);
    if (grad) grad->assign(model.parameter_count(), 0.0);

    // Offsets of each layer's block inside the flat gradient.
    std::vector<std::size_t> offset(layers, 0);
    for (std::size_t l = 1; l < layers; ++l)
        offset[l] = offset[l - 1] + model.weights(l - 1).data().size() + model.bias(l - 1).size();

    double loss = 0.0;
    std::vector<std::vector<double>> acts(layers + 1);
    for (const std::size_t i : rows) {
        const auto in = data.features(i);
        acts[0].assign(in.begin(), in.end());
        for (std::size_t l = 0; l < layers; ++l) {
            std::vector<double> z = num::multiply(model.weights(l), acts[l]);
            for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::max(0.0, z[j] + model.bias(l)[j]);
            acts[l + 1] = std::move(z);
        }
        const auto label = data.labels(i);
        std::vector<double> delta(width);
        for (std::size_t r = 0; r < width; ++r) {
            const double diff = acts[layers][r] - label[r];
            loss += diff * diff;
            delta[r] = acts[layers][r] > 0.0 ? 2.0 * diff * scale : 0.0;
        }
        if (!grad) continue;
        for (std::size_t l = layers; l-- > 0;) {
            const auto& w = model.weights(l);
            const auto& a = acts[l];
            double* gw = grad->data() + offset[l];
            double* gb = gw + w.data().size();
            for (std::size_t o = 0; o < w.rows(); ++o) {
                const double dv = delta[o];
                gb[o] += dv;
                if (dv == 0.0) continue;
                double* row = gw + o * w.cols();
                for (std::size_t c = 0; c < w.cols(); ++c) row[c] += dv * a[c];
            }
            if (l == 0) break;
            std::vector<double> prev(w.cols(), 0.0);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                if (delta[o] == 0.0) continue;
                const auto wr = w.row(o);
                for (std::size_t c = 0; c < w.cols(); ++c) prev[c] += wr[c] * delta[o];
            }
            for (std::size_t c = 0; c < prev.size(); ++c)
                if (a[c] <= 0.0) prev[c] = 0.0;
            delta = std::move(prev);
        }
    }
    return loss * scale;
}

TrainResult train_mlp(const HybridDataset& data, const TrainOptions& opts, std::uint64_t seed) {
    if (!(opts.split_ratio > 0.0 && opts.split_ratio < 1.0)) throw ValidationError("train_mlp: split_ratio must be in (0, 1)");
    if (data.size() == 0 || data.width() == 0) throw ValidationError("train_mlp: empty dataset");

    TrainResult out;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    num::Rng rng(num::derive_seed(seed, "split"));
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t n_train = static_cast<std::size_t>(std::llround(opts.split_ratio * static_cast<double>(data.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, data.size() > 1 ? data.size() - 1 : 1);
    out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    std::vector<std::size_t> sizes{3 * data.width()};
    sizes.insert(sizes.end(), opts.hidden.begin(), opts.hidden.end());
    sizes.push_back(data.width());
    out.model = MlpModel::initialize(std::move(sizes), num::derive_seed(seed, "init"));

    std::vector<double> params = out.model.parameters();
    num::AdamState adam(params.size(), opts.lr);
    std::vector<double> grad;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        const double loss = mse_loss(out.model, data, out.train_rows, &grad);
        if (!std::isfinite(loss)) throw DivergenceError("train_mlp: loss became non-finite at epoch " + std::to_string(epoch + 1));
        num::adam_step(params, grad, adam);
        out.model.set_parameters(params);
        out.train_loss.push_back(loss);
        out.val_loss.push_back(out.test_rows.empty() ? 0.0 : mse_loss(out.model, data, out.test_rows));
    }
    return out;
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k, std::span<const bool> excluded) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (excluded.empty() || !excluded[i]) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (idx.size() > k) idx.resize(k);
    return idx;
}

namespace {

std::vector<BusinessId> rank_restaurants(std::span<const double> scores, const std::vector<BusinessId>& restaurants,
                                         std::size_t k, const ItemSet& exclude) {
    if (k > restaurants.size()) throw ValidationError("predict: k exceeds the restaurant count");
    std::vector<char> skip(restaurants.size(), 0);
    for (std::size_t r = 0; r < restaurants.size(); ++r) skip[r] = exclude.contains(restaurants[r]);
    std::vector<bool> mask(skip.begin(), skip.end());
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!mask[i]) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (idx.size() > k) idx.resize(k);
    std::vector<BusinessId> out;
    for (const auto i : idx) out.push_back(restaurants[i]);
    return out;
}

}  // namespace

std::vector<BusinessId> predict_hybrid(const MlpModel& model, std::span<const double> features,
                                       const std::vector<BusinessId>& restaurants, std::size_t k,
                                       const ItemSet& exclude) {
    const std::vector<double> scores = model.forward(features);
    if (scores.size() != restaurants.size()) throw ValidationError("predict_hybrid: model width differs from restaurant list");
    return rank_restaurants(scores, restaurants, k, exclude);
}

double blend_loss(const HybridDataset& data, std::span<const std::size_t> rows, const BlendWeights& alpha,
                  BlendWeights* grad) {
    if (rows.empty()) throw ValidationError("blend_loss: no rows selected");
    const std::size_t width = data.width();
    const double scale = 1.0 / static_cast<double>(rows.size() * width);
    double loss = 0.0;
    BlendWeights g{0.0, 0.0, 0.0};
    for (const std::size_t i : rows) {
        for (std::size_t r = 0; r < width; ++r) {
            double score = 0.0;
            for (std::size_t e = 0; e < 3; ++e) score += alpha[e] * data.x_at(i, e, r);
            const double diff = score - data.y[i * width + r];
            loss += diff * diff;
            for (std::size_t e = 0; e < 3; ++e) g[e] += 2.0 * diff * data.x_at(i, e, r);
        }
    }
    if (grad)
        for (std::size_t e = 0; e < 3; ++e) (*grad)[e] = g[e] * scale;
    return loss * scale;
}

BlendWeights fit_linear_blend(const HybridDataset& data, std::span<const std::size_t> rows, std::size_t epochs,
                              double lr) {
    BlendWeights alpha{0.0, 0.0, 0.0};
    BlendWeights g{};
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        blend_loss(data, rows, alpha, &g);
        for (std::size_t e = 0; e < 3; ++e) alpha[e] -= lr * g[e];
        if (!std::isfinite(alpha[0] + alpha[1] + alpha[2]))
            throw DivergenceError("fit_linear_blend: weights became non-finite at epoch " + std::to_string(epoch + 1));
    }
    return alpha;
}

std::vector<BusinessId> predict_blend(const BlendWeights& alpha, const HybridDataset& data, std::size_t row,
                                      std::size_t k, const ItemSet& exclude) {
    std::vector<double> scores(data.width(), 0.0);
    for (std::size_t r = 0; r < data.width(); ++r)
        for (std::size_t e = 0; e < 3; ++e) scores[r] += alpha[e] * data.x_at(row, e, r);
    return rank_restaurants(scores, data.restaurants, k, exclude);
}

void save_model(const MlpModel& model, const std::filesystem::path& dir, const std::string& stem,
                const nlohmann::json& extra) {
    nlohmann::json manifest = extra.is_object() ? extra : nlohmann::json::object();
    manifest["layer_sizes"] = model.sizes();
    manifest["activation"] = "relu";
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < model.layers(); ++l) {
        const std::string wname = stem + "_w" + std::to_string(l) + ".csv";
        const std::string bname = stem + "_b" + std::to_string(l) + ".csv";
        std::ofstream w(dir / wname);
        num::write_csv(model.weights(l), w);
        num::DenseMatrix b(1, model.bias(l).size());
        std::copy(model.bias(l).begin(), model.bias(l).end(), b.data().begin());
        std::ofstream bo(dir / bname);
        num::write_csv(b, bo);
        layers.push_back({{"weights", wname}, {"bias", bname}});
    }
    manifest["layers"] = layers;
    std::ofstream out(dir / (stem + ".json"));
    out << manifest.dump(2) << '\n';
}

MlpModel load_model(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw MissingArtifactError(manifest_path.string());
    const nlohmann::json manifest = nlohmann::json::parse(in);
    const auto sizes = manifest.at("layer_sizes").get<std::vector<std::size_t>>();
    MlpModel model = MlpModel::initialize(sizes, 0);
    const auto dir = manifest_path.parent_path();
    const auto& layers = manifest.at("layers");
    if (layers.size() != model.layers()) throw ValidationError("model manifest: layer count mismatch");
    for (std::size_t l = 0; l < model.layers(); ++l) {
        const auto wpath = dir / layers[l].at("weights").get<std::string>();
        const auto bpath = dir / layers[l].at("bias").get<std::string>();
        std::ifstream w(wpath);
        if (!w) throw MissingArtifactError(wpath.string());
        num::DenseMatrix wm = num::read_csv(w, wpath.string());
        std::ifstream b(bpath);
        if (!b) throw MissingArtifactError(bpath.string());
        const num::DenseMatrix bm = num::read_csv(b, bpath.string());
        if (wm.rows() != model.weights(l).rows() || wm.cols() != model.weights(l).cols() ||
            bm.cols() != model.bias(l).size())
            throw ValidationError("model manifest: layer " + std::to_string(l) + " has the wrong shape");
        model.weights(l) = std::move(wm);
        model.bias(l).assign(bm.data().begin(), bm.data().end());
    }
    return model;
}

}  // namespace grembed::hybrid
