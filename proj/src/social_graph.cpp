#include "grembed/social_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>

#include "grembed/error.hpp"

namespace grembed {

WeightedGraph WeightedGraph::from_edges(std::vector<UserId> users, const std::vector<Edge>& edges) {
    const std::size_t n = users.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return users[a] < users[b]; });
    std::vector<std::size_t> remap(n);
    for (std::size_t k = 0; k < n; ++k) remap[order[k]] = k;

    WeightedGraph g;
    g.users_.resize(n);
    for (std::size_t k = 0; k < n; ++k) g.users_[k] = std::move(users[order[k]]);
    for (std::size_t k = 0; k < n; ++k) {
        if (!g.index_.emplace(g.users_[k], k).second) throw ValidationError("duplicate user id: " + g.users_[k]);
    }

    std::vector<std::vector<Neighbor>> lists(n);
    for (const auto& [a, b, w] : edges) {
        if (a >= n || b >= n) throw ValidationError("edge endpoint out of range");
        if (a == b) throw ValidationError("self-loop on " + g.users_[remap[a]]);
        if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("edge weight outside [0, 1]");
        lists[remap[a]].push_back({remap[b], w});
        lists[remap[b]].push_back({remap[a], w});
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& l = lists[i];
        std::sort(l.begin(), l.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
        for (std::size_t k = 1; k < l.size(); ++k)
            if (l[k].node == l[k - 1].node) throw ValidationError("duplicate edge at " + g.users_[i]);
        g.offsets_[i + 1] = g.offsets_[i] + l.size();
        g.adjacency_.insert(g.adjacency_.end(), l.begin(), l.end());
    }
    g.edge_count_ = edges.size();
    return g;
}

std::optional<std::size_t> WeightedGraph::index_of(const UserId& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double WeightedGraph::weighted_degree(std::size_t i) const noexcept {
    double s = 0.0;
    for (const auto& nb : neighbors(i)) s += nb.weight;
    return s;
}

bool WeightedGraph::has_edge(std::size_t i, std::size_t j) const noexcept {
    const auto nb = neighbors(i);
    const auto it = std::lower_bound(nb.begin(), nb.end(), j, [](const Neighbor& x, std::size_t v) { return x.node < v; });
    return it != nb.end() && it->node == j;
}

double WeightedGraph::weight(std::size_t i, std::size_t j) const noexcept {
    const auto nb = neighbors(i);
    const auto it = std::lower_bound(nb.begin(), nb.end(), j, [](const Neighbor& x, std::size_t v) { return x.node < v; });
    return (it != nb.end() && it->node == j) ? it->weight : 0.0;
}

num::SparseMatrix WeightedGraph::adjacency_matrix() const {
    std::vector<num::SparseMatrix::Triplet> t;
    t.reserve(adjacency_.size());
    for (std::size_t i = 0; i < size(); ++i)
        for (const auto& nb : neighbors(i)) t.emplace_back(i, nb.node, nb.weight);
    return num::SparseMatrix::from_triplets(size(), size(), std::move(t));
}

std::vector<std::size_t> WeightedGraph::components(std::size_t* count) const {
    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(size(), unset);
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < size(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (const auto& nb : neighbors(v)) {
                if (label[nb.node] == unset) {
                    label[nb.node] = next;
                    stack.push_back(nb.node);
                }
            }
        }
        ++next;
    }
    if (count) *count = next;
    return label;
}

namespace graph {

namespace {

std::size_t intersection_size(const ItemSet& a, const ItemSet& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++n;
            ++i;
            ++j;
        }
    }
    return n;
}

}  // namespace

double similarity_weight(const ItemSet& liked_i, const ItemSet& disliked_i, const ItemSet& liked_j,
                         const ItemSet& disliked_j) {
    ItemSet all = liked_i;
    all.insert(liked_j.begin(), liked_j.end());
    all.insert(disliked_i.begin(), disliked_i.end());
    all.insert(disliked_j.begin(), disliked_j.end());
    if (all.empty()) return 0.0;
    const auto shared = intersection_size(liked_i, liked_j) + intersection_size(disliked_i, disliked_j);
    return static_cast<double>(shared) / static_cast<double>(all.size());
}

WeightedGraph build_weighted_graph(const FriendshipList& friendships, const RatingsTable& ratings,
                                   const std::set<UserId>& active, double epsilon) {
    if (!(epsilon >= 0.0)) throw ValidationError("build_weighted_graph: epsilon must be >= 0");
    std::vector<std::tuple<UserId, UserId, double>> kept;
    std::set<UserId> nodes;
    for (const auto& [a, b] : friendships.pairs) {
        if (!active.contains(a) || !active.contains(b)) continue;
        double w = similarity_weight(ratings.liked_by(a), ratings.disliked_by(a), ratings.liked_by(b),
                                     ratings.disliked_by(b));
        if (w <= 0.0) {
            if (epsilon <= 0.0) continue;
            w = epsilon;
        }
        kept.emplace_back(a, b, w);
        nodes.insert(a);
        nodes.insert(b);
    }
    if (kept.empty()) throw EmptyResultError("weighted graph is empty: no friendship edge carries weight");

    std::vector<UserId> users(nodes.begin(), nodes.end());
    std::unordered_map<UserId, std::size_t> pos;
    for (std::size_t i = 0; i < users.size(); ++i) pos.emplace(users[i], i);
    std::vector<WeightedGraph::Edge> edges;
    edges.reserve(kept.size());
    for (const auto& [a, b, w] : kept) edges.emplace_back(pos.at(a), pos.at(b), w);
    return WeightedGraph::from_edges(std::move(users), edges);
}

GraphStats graph_stats(const WeightedGraph& g) {
    if (g.empty()) throw EmptyResultError("graph_stats: empty graph");
    GraphStats s;
    s.nodes = g.size();
    s.edges = g.edge_count();
    s.avg_degree = 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
    return s;
}

void write_edge_list(const WeightedGraph& g, std::ostream& out) {
    out << "# nodes=" << g.size() << " edges=" << g.edge_count() << '\n';
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& nb : g.neighbors(i))
            if (i < nb.node) out << g.user(i) << '\t' << g.user(nb.node) << '\t' << num::format_double(nb.weight) << '\n';
}

WeightedGraph read_edge_list(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
    std::size_t nodes = 0;
    std::size_t edges = 0;
    if (std::sscanf(line.c_str(), "# nodes=%zu edges=%zu", &nodes, &edges) != 2)
        throw ParseError(source, 1, "header must read '# nodes=<n> edges=<m>'");

    std::vector<UserId> users;
    std::unordered_map<UserId, std::size_t> pos;
    auto intern = [&](const std::string& id) {
        const auto [it, inserted] = pos.emplace(id, users.size());
        if (inserted) users.push_back(id);
        return it->second;
    };
    std::vector<WeightedGraph::Edge> list;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw ParseError(source, lineno, "expected three tab-separated fields");
        const std::string_view wtext = std::string_view(line).substr(t2 + 1);
        double w = 0.0;
        const auto res = std::from_chars(wtext.data(), wtext.data() + wtext.size(), w);
        if (res.ec != std::errc{} || res.ptr != wtext.data() + wtext.size())
            throw ParseError(source, lineno, "bad weight");
        const auto a = intern(line.substr(0, t1));
        const auto b = intern(line.substr(t1 + 1, t2 - t1 - 1));
        list.emplace_back(a, b, w);
    }
    if (users.size() != nodes || list.size() != edges)
        throw ParseError(source, 1, "header counts do not match the edge list");
    if (list.empty()) throw EmptyResultError(source + ": empty graph");
    return WeightedGraph::from_edges(std::move(users), list);
}

}  // namespace graph
}  // namespace grembed
