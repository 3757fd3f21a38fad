#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "grembed/ingest.hpp"
#include "grembed/matrix.hpp"

namespace grembed {

struct Neighbor {
    std::size_t node = 0;
    double weight = 0.0;

    bool operator==(const Neighbor&) const = default;
};

/// Undirected user graph with similarity weights in [0, 1]. Nodes are indexed
/// densely in ascending user-id order; neighbor lists are sorted by index and
/// every edge is stored in both endpoints' lists.
class WeightedGraph {
public:
    using Edge = std::tuple<std::size_t, std::size_t, double>;

    WeightedGraph() = default;

    // `users` must be unique; edges reference positions in `users` and are
    // stored once each (either orientation). Users are re-sorted by id.
    static WeightedGraph from_edges(std::vector<UserId> users, const std::vector<Edge>& edges);

    std::size_t size() const noexcept { return users_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }
    bool empty() const noexcept { return users_.empty(); }

    const std::vector<UserId>& users() const noexcept { return users_; }
    const UserId& user(std::size_t i) const { return users_.at(i); }
    std::optional<std::size_t> index_of(const UserId& id) const;

    std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
        return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
    double weighted_degree(std::size_t i) const noexcept;
    bool has_edge(std::size_t i, std::size_t j) const noexcept;
    double weight(std::size_t i, std::size_t j) const noexcept;

    num::SparseMatrix adjacency_matrix() const;
    // Component label per node, labels numbered from 0 in order of first node.
    std::vector<std::size_t> components(std::size_t* count = nullptr) const;

    bool operator==(const WeightedGraph& other) const {
        return users_ == other.users_ && offsets_ == other.offsets_ && adjacency_ == other.adjacency_;
    }

private:
    std::vector<UserId> users_;
    std::unordered_map<UserId, std::size_t> index_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adjacency_;
    std::size_t edge_count_ = 0;
};

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double avg_degree = 0.0;
};

namespace graph {

/// (|Li ∩ Lj| + |Di ∩ Dj|) / |Li ∪ Lj ∪ Di ∪ Dj|, or 0 when every set is empty.
double similarity_weight(const ItemSet& liked_i, const ItemSet& disliked_i, const ItemSet& liked_j,
                         const ItemSet& disliked_j);

/// Re-weights friendship edges between active users by taste similarity.
/// Zero-similarity edges get `epsilon` when it is positive and are dropped
/// otherwise. Only users left with an edge become nodes.
WeightedGraph build_weighted_graph(const FriendshipList& friendships, const RatingsTable& ratings,
                                   const std::set<UserId>& active, double epsilon);

GraphStats graph_stats(const WeightedGraph& g);

// TSV edge list: `# nodes=<n> edges=<m>` header then `user<TAB>user<TAB>weight`.
void write_edge_list(const WeightedGraph& g, std::ostream& out);
WeightedGraph read_edge_list(std::istream& in, const std::string& source = "<stream>");

}  // namespace graph
}  // namespace grembed
