#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grembed/ingest.hpp"
#include "grembed/matrix.hpp"

namespace grembed {

enum class EmbeddingMethod { node2vec, spectral, hope };

std::string_view to_string(EmbeddingMethod m) noexcept;
EmbeddingMethod parse_method(std::string_view name);

// Node vectors from one embedding method. Row i belongs to users()[i].
class Embedding {
public:
    Embedding() = default;
    Embedding(EmbeddingMethod method, std::vector<UserId> users, num::DenseMatrix vectors);

    EmbeddingMethod method() const noexcept { return method_; }
    std::size_t size() const noexcept { return vectors_.rows(); }
    std::size_t dim() const noexcept { return vectors_.cols(); }
    const std::vector<UserId>& users() const noexcept { return users_; }
    const num::DenseMatrix& vectors() const noexcept { return vectors_; }
    std::span<const double> row(std::size_t i) const noexcept { return vectors_.row(i); }
    std::optional<std::size_t> row_of(const UserId& id) const;

    // Throws DegenerateEmbeddingError on non-finite entries or an all-zero row.
    void validate() const;

    bool operator==(const Embedding& o) const {
        return method_ == o.method_ && users_ == o.users_ && vectors_ == o.vectors_;
    }

private:
    EmbeddingMethod method_ = EmbeddingMethod::node2vec;
    std::vector<UserId> users_;
    num::DenseMatrix vectors_;
    std::unordered_map<UserId, std::size_t> index_;
};

namespace embed {

// CSV: `user_id,dim0,...,dim{D-1}` header then one row per node.
void write_csv(const Embedding& e, std::ostream& out);
Embedding read_csv(std::istream& in, EmbeddingMethod method, const std::string& source = "<stream>");

}  // namespace embed
}  // namespace grembed
