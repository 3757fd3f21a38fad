#include "grembed/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "grembed/error.hpp"

namespace grembed {

std::string_view to_string(EmbeddingMethod m) noexcept {
    switch (m) {
        case EmbeddingMethod::node2vec: return "node2vec";
        case EmbeddingMethod::spectral: return "spectral";
        case EmbeddingMethod::hope: return "hope";
    }
    return "unknown";
}

EmbeddingMethod parse_method(std::string_view name) {
    if (name == "node2vec") return EmbeddingMethod::node2vec;
    if (name == "spectral") return EmbeddingMethod::spectral;
    if (name == "hope") return EmbeddingMethod::hope;
    throw ValidationError("unknown embedding method '" + std::string(name) + "'");
}

Embedding::Embedding(EmbeddingMethod method, std::vector<UserId> users, num::DenseMatrix vectors)
    : method_(method), users_(std::move(users)), vectors_(std::move(vectors)) {
    if (users_.size() != vectors_.rows()) throw ValidationError("embedding: one row per user required");
    for (std::size_t i = 0; i < users_.size(); ++i)
        if (!index_.emplace(users_[i], i).second) throw ValidationError("embedding: duplicate user " + users_[i]);
}

std::optional<std::size_t> Embedding::row_of(const UserId& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void Embedding::validate() const {
    double largest = 0.0;
    std::vector<double> norms(size());
    for (std::size_t i = 0; i < size(); ++i) {
        for (const double v : row(i))
            if (!std::isfinite(v))
                throw DegenerateEmbeddingError(std::string(to_string(method_)) + " embedding has a non-finite entry for " + users_[i]);
        norms[i] = num::norm2(row(i));
        largest = std::max(largest, norms[i]);
    }
    for (std::size_t i = 0; i < size(); ++i)
        if (norms[i] == 0.0 || norms[i] <= 1e-12 * largest)
            throw DegenerateEmbeddingError(std::string(to_string(method_)) + " embedding row is zero for " + users_[i]);
}

namespace embed {

void write_csv(const Embedding& e, std::ostream& out) {
    out << "user_id";
    for (std::size_t c = 0; c < e.dim(); ++c) out << ",dim" << c;
    out << '\n';
    for (std::size_t r = 0; r < e.size(); ++r) {
        out << e.users()[r];
        for (const double v : e.row(r)) out << ',' << num::format_double(v);
        out << '\n';
    }
}

Embedding read_csv(std::istream& in, EmbeddingMethod method, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("user_id", 0) != 0) throw ParseError(source, 1, "missing user_id header");
    const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<UserId> users;
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string_view rest(line);
        auto comma = rest.find(',');
        if (comma == std::string_view::npos) throw ParseError(source, lineno, "row has no values");
        users.emplace_back(rest.substr(0, comma));
        rest.remove_prefix(comma + 1);
        for (std::size_t c = 0; c < dim; ++c) {
            comma = rest.find(',');
            const auto field = rest.substr(0, comma);
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
                throw ParseError(source, lineno, "bad value '" + std::string(field) + "'");
            values.push_back(v);
            if ((comma == std::string_view::npos) != (c + 1 == dim)) throw ParseError(source, lineno, "wrong column count");
            if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
        }
    }
    num::DenseMatrix m(users.size(), dim);
    std::copy(values.begin(), values.end(), m.data().begin());
    return Embedding(method, std::move(users), std::move(m));
}

}  // namespace embed
}  // namespace grembed
