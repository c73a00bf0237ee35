#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sgm {

using Permutation = std::vector<int>;

/// Thrown when an input file does not follow the edge-list or CSV format.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Simple undirected graph stored as sorted adjacency lists.
///
/// Self-loops and parallel edges are removed on construction, so the
/// implied 0/1 adjacency matrix is symmetric with a zero diagonal.
/// Instances are immutable once built.
class Graph {
public:
    Graph() = default;

    explicit Graph(int n) : adj_(static_cast<std::size_t>(check_size(n))) {}

    template <typename EdgeRange>
    Graph(int n, const EdgeRange& edges) : Graph(n) {
        for (const auto& [u, v] : edges) {
            check_vertex(u);
            check_vertex(v);
            if (u == v) continue;
            adj_[static_cast<std::size_t>(u)].push_back(v);
            adj_[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& list : adj_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            edge_count_ += list.size();
        }
        edge_count_ /= 2;
    }

    int n() const { return static_cast<int>(adj_.size()); }
    std::size_t edge_count() const { return edge_count_; }

    std::span<const int> neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
    int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }

    bool has_edge(int u, int v) const {
        const auto& list = adj_[static_cast<std::size_t>(u)];
        return std::binary_search(list.begin(), list.end(), v);
    }

    /// Edges as (u, v) with u < v, in row-major order.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count_);
        for (int u = 0; u < n(); ++u)
            for (int v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    /// Dense 0/1 block with rows `rows` and columns `cols`.
    Eigen::MatrixXd block(std::span<const int> rows, std::span<const int> cols) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                    static_cast<Eigen::Index>(cols.size()));
        std::vector<int> col_pos(static_cast<std::size_t>(n()), -1);
        for (std::size_t j = 0; j < cols.size(); ++j) col_pos[static_cast<std::size_t>(cols[j])] = static_cast<int>(j);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (int w : neighbors(rows[i]))
                if (int j = col_pos[static_cast<std::size_t>(w)]; j >= 0) out(static_cast<Eigen::Index>(i), j) = 1.0;
        return out;
    }

    Eigen::MatrixXd dense() const {
        std::vector<int> all(static_cast<std::size_t>(n()));
        for (int i = 0; i < n(); ++i) all[static_cast<std::size_t>(i)] = i;
        return block(all, all);
    }

    /// Graph on the same vertex set with vertex v renamed to relabel[v].
    Graph relabeled(std::span<const int> relabel) const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count_);
        for (auto [u, v] : edges()) out.emplace_back(relabel[static_cast<std::size_t>(u)], relabel[static_cast<std::size_t>(v)]);
        return Graph(n(), out);
    }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    static int check_size(int n) {
        if (n < 0) throw std::invalid_argument("graph size must be nonnegative");
        return n;
    }
    void check_vertex(int v) const {
        if (v < 0 || v >= n()) throw std::out_of_range("vertex " + std::to_string(v) + " outside graph of size " + std::to_string(n()));
    }

    std::vector<std::vector<int>> adj_;
    std::size_t edge_count_ = 0;
};

/// Bijection between external vertex labels and indices 0..size()-1,
/// assigned in first-appearance order.
class VertexMap {
public:
    int add(const std::string& label) {
        auto [it, inserted] = index_.try_emplace(label, static_cast<int>(labels_.size()));
        if (inserted) labels_.push_back(label);
        return it->second;
    }

    std::optional<int> find(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& label(int index) const { return labels_[static_cast<std::size_t>(index)]; }
    int size() const { return static_cast<int>(labels_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Map whose labels are the decimal strings "0".."n-1".
    static VertexMap identity(int n) {
        VertexMap map;
        for (int i = 0; i < n; ++i) map.add(std::to_string(i));
        return map;
    }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> index_;
};

struct LoadOptions {
    /// Keep only the first `max_vertices` labels in file order; edges touching
    /// later labels are dropped. Zero means no truncation.
    int max_vertices = 0;
};

/// Reads a whitespace-separated edge list. Lines whose first non-blank
/// character is '#' and blank lines are skipped; tokens after the second are
/// ignored. New labels are appended to `map`.
inline Graph read_edgelist(std::istream& in, VertexMap& map, const std::string& source = "<stream>",
                           const LoadOptions& options = {}) {
    std::vector<std::pair<int, int>> edges;
    std::string line;
    std::size_t line_no = 0;
    const auto accept = [&](const std::string& label) -> std::optional<int> {
        if (auto found = map.find(label)) return found;
        if (options.max_vertices > 0 && map.size() >= options.max_vertices) return std::nullopt;
        return map.add(label);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream tokens(line);
        std::string a, b;
        if (!(tokens >> a >> b)) throw ParseError(source, line_no, "expected two vertex labels");
        const auto u = accept(a);
        const auto v = accept(b);
        if (u && v) edges.emplace_back(*u, *v);
    }
    if (in.bad()) throw std::runtime_error(source + ": read error");
    return Graph(map.size(), edges);
}

inline std::pair<Graph, VertexMap> load_edgelist(const std::string& path, const LoadOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    VertexMap map;
    Graph g = read_edgelist(in, map, path, options);
    return {std::move(g), std::move(map)};
}

/// Edge list whose labels are the vertex indices 0..n-1. The vertex count is
/// `n` when positive, else a leading "# n=<count>" comment, else one more
/// than the largest index seen.
inline Graph load_indexed_edgelist(const std::string& path, int n = 0) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<int, int>> edges;
    std::string line;
    std::size_t line_no = 0;
    int declared = 0, largest = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            if (const auto pos = line.find("n="); pos != std::string::npos && declared == 0) {
                try {
                    declared = std::stoi(line.substr(pos + 2));
                } catch (const std::exception&) {
                    throw ParseError(path, line_no, "malformed vertex count");
                }
            }
            continue;
        }
        std::istringstream tokens(line);
        long long a = 0, b = 0;
        if (!(tokens >> a >> b)) throw ParseError(path, line_no, "expected two integer vertex indices");
        if (a < 0 || b < 0 || a > std::numeric_limits<int>::max() || b > std::numeric_limits<int>::max())
            throw ParseError(path, line_no, "vertex index out of range");
        edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        largest = std::max({largest, static_cast<int>(a), static_cast<int>(b)});
    }
    const int size = n > 0 ? n : (declared > 0 ? declared : largest + 1);
    if (largest >= size) throw std::invalid_argument(path + ": vertex " + std::to_string(largest) + " exceeds n=" + std::to_string(size));
    return Graph(size, edges);
}

inline void write_edgelist(std::ostream& out, const Graph& g, const VertexMap* map = nullptr) {
    for (auto [u, v] : g.edges()) {
        if (map)
            out << map->label(u) << ' ' << map->label(v) << '\n';
        else
            out << u << ' ' << v << '\n';
    }
}

/// Two-column CSV `label,index`.
inline void write_index_map_csv(std::ostream& out, const VertexMap& map) {
    out << "label,index\n";
    for (int i = 0; i < map.size(); ++i) out << map.label(i) << ',' << i << '\n';
}

/// Induced subgraph on `vertices`; vertex vertices[i] becomes i.
inline Graph induced_subgraph(const Graph& g, std::span<const int> vertices) {
    std::vector<int> pos(static_cast<std::size_t>(g.n()), -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) pos[static_cast<std::size_t>(vertices[i])] = static_cast<int>(i);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (int w : g.neighbors(vertices[i]))
            if (int j = pos[static_cast<std::size_t>(w)]; j > static_cast<int>(i)) edges.emplace_back(static_cast<int>(i), j);
    return Graph(static_cast<int>(vertices.size()), edges);
}

/// Component id per vertex; ids are assigned in order of each component's
/// smallest vertex.
inline std::vector<int> connected_components(const Graph& g, int* count = nullptr) {
    std::vector<int> comp(static_cast<std::size_t>(g.n()), -1);
    int next = 0;
    std::queue<int> frontier;
    for (int start = 0; start < g.n(); ++start) {
        if (comp[static_cast<std::size_t>(start)] >= 0) continue;
        comp[static_cast<std::size_t>(start)] = next;
        frontier.push(start);
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (int w : g.neighbors(u)) {
                if (comp[static_cast<std::size_t>(w)] < 0) {
                    comp[static_cast<std::size_t>(w)] = next;
                    frontier.push(w);
                }
            }
        }
        ++next;
    }
    if (count) *count = next;
    return comp;
}

struct ComponentResult {
    Graph graph;
    /// old index -> new index, -1 for vertices outside the component.
    std::vector<int> old_to_new;
    /// new index -> old index.
    std::vector<int> vertices;
};

/// Induced subgraph on the largest connected component. Equal sizes are
/// resolved in favour of the component containing the smaller vertex index.
inline ComponentResult largest_connected_component(const Graph& g) {
    ComponentResult out;
    out.old_to_new.assign(static_cast<std::size_t>(g.n()), -1);
    if (g.n() == 0) return out;
    int count = 0;
    const auto comp = connected_components(g, &count);
    std::vector<int> sizes(static_cast<std::size_t>(count), 0);
    for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
    const int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (int v = 0; v < g.n(); ++v) {
        if (comp[static_cast<std::size_t>(v)] == best) {
            out.old_to_new[static_cast<std::size_t>(v)] = static_cast<int>(out.vertices.size());
            out.vertices.push_back(v);
        }
    }
    out.graph = induced_subgraph(g, out.vertices);
    return out;
}

inline int largest_component_size(const Graph& g) {
    if (g.n() == 0) return 0;
    int count = 0;
    const auto comp = connected_components(g, &count);
    std::vector<int> sizes(static_cast<std::size_t>(count), 0);
    for (int c : comp) ++sizes[static_cast<std::size_t>(c)];
    return *std::max_element(sizes.begin(), sizes.end());
}

inline bool is_permutation_of(std::span<const int> pi, int n) {
    if (static_cast<int>(pi.size()) != n) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int x : pi) {
        if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)]) return false;
        seen[static_cast<std::size_t>(x)] = 1;
    }
    return true;
}

inline Permutation invert(std::span<const int> pi) {
    Permutation inv(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) inv[static_cast<std::size_t>(pi[i])] = static_cast<int>(i);
    return inv;
}

/// Graph with edge (u, v) iff g1 has (u, v) and g2 has (pi(u), pi(v)).
inline Graph intersect(const Graph& g1, const Graph& g2, std::span<const int> pi) {
    if (g1.n() != g2.n()) throw std::invalid_argument("intersect: graph sizes differ");
    if (!is_permutation_of(pi, g1.n())) throw std::invalid_argument("intersect: pi is not a permutation");
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g1.edges())
        if (g2.has_edge(pi[static_cast<std::size_t>(u)], pi[static_cast<std::size_t>(v)])) edges.emplace_back(u, v);
    return Graph(g1.n(), edges);
}

/// Revealed correspondence: vertex `vertices[i]` of A maps to `images[i]` of B.
/// Vertices are kept sorted ascending.
struct SeedMap {
    std::vector<int> vertices;
    std::vector<int> images;

    std::size_t size() const { return vertices.size(); }

    /// Sorts by vertex and checks range and injectivity against graphs of size n.
    void normalize(int n) {
        if (vertices.size() != images.size()) throw std::invalid_argument("seed map: vertex and image counts differ");
        std::vector<std::size_t> order(vertices.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return vertices[x] < vertices[y]; });
        std::vector<int> v(order.size()), im(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            v[i] = vertices[order[i]];
            im[i] = images[order[i]];
        }
        std::vector<char> seen_v(static_cast<std::size_t>(n), 0), seen_im(static_cast<std::size_t>(n), 0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0 || v[i] >= n) throw std::invalid_argument("seed map: revealed vertex " + std::to_string(v[i]) + " out of range");
            if (im[i] < 0 || im[i] >= n) throw std::invalid_argument("seed map: seed image " + std::to_string(im[i]) + " out of range");
            if (seen_v[static_cast<std::size_t>(v[i])]) throw std::invalid_argument("seed map: vertex " + std::to_string(v[i]) + " revealed twice");
            if (seen_im[static_cast<std::size_t>(im[i])]) throw std::invalid_argument("seed map: not injective at image " + std::to_string(im[i]));
            seen_v[static_cast<std::size_t>(v[i])] = seen_im[static_cast<std::size_t>(im[i])] = 1;
        }
        vertices = std::move(v);
        images = std::move(im);
    }

    /// Vertices of A that are not revealed, ascending.
    std::vector<int> unrevealed(int n) const { return complement(vertices, n); }
    /// Vertices of B that are not seed images, ascending.
    std::vector<int> unmatched_images(int n) const { return complement(images, n); }

    static std::vector<int> complement(std::span<const int> taken, int n) {
        std::vector<char> mark(static_cast<std::size_t>(n), 0);
        for (int x : taken) mark[static_cast<std::size_t>(x)] = 1;
        std::vector<int> out;
        for (int i = 0; i < n; ++i)
            if (!mark[static_cast<std::size_t>(i)]) out.push_back(i);
        return out;
    }
};

struct AlignedPair {
    Graph a;
    Graph b;
    /// Ground truth: vertex i of `a` corresponds to truth[i] of `b`.
    Permutation truth;
    /// Labels of the aligned vertex set, indexed consistently for `a`.
    VertexMap labels;
};

/// Restricts both graphs to labels present in both maps, reindexed in the
/// order they appear in `map_a`. The ground truth is the identity.
inline AlignedPair align_pair(const Graph& ga, const Graph& gb, const VertexMap& map_a, const VertexMap& map_b) {
    std::vector<int> keep_a, keep_b;
    AlignedPair out;
    for (int i = 0; i < map_a.size(); ++i) {
        if (auto j = map_b.find(map_a.label(i))) {
            keep_a.push_back(i);
            keep_b.push_back(*j);
            out.labels.add(map_a.label(i));
        }
    }
    if (keep_a.empty()) throw std::invalid_argument("align_pair: the two graphs share no vertex labels");
    out.a = induced_subgraph(ga, keep_a);
    out.b = induced_subgraph(gb, keep_b);
    out.truth.resize(keep_a.size());
    for (std::size_t i = 0; i < keep_a.size(); ++i) out.truth[i] = static_cast<int>(i);
    return out;
}

/// As above but with an explicit correspondence (label in A, label in B).
/// Pairs whose labels are missing from either graph are skipped; both sides
/// must be injective.
inline AlignedPair align_pair(const Graph& ga, const Graph& gb, const VertexMap& map_a, const VertexMap& map_b,
                              std::span<const std::pair<std::string, std::string>> correspondence) {
    std::vector<int> keep_a, keep_b;
    std::vector<char> used_a(static_cast<std::size_t>(ga.n()), 0), used_b(static_cast<std::size_t>(gb.n()), 0);
    AlignedPair out;
    for (const auto& [la, lb] : correspondence) {
        auto i = map_a.find(la);
        auto j = map_b.find(lb);
        if (!i || !j) continue;
        if (used_a[static_cast<std::size_t>(*i)] || used_b[static_cast<std::size_t>(*j)])
            throw std::invalid_argument("align_pair: correspondence is not one-to-one at " + la + "," + lb);
        used_a[static_cast<std::size_t>(*i)] = used_b[static_cast<std::size_t>(*j)] = 1;
        keep_a.push_back(*i);
        keep_b.push_back(*j);
        out.labels.add(la);
    }
    if (keep_a.empty()) throw std::invalid_argument("align_pair: correspondence matches no vertices");
    out.a = induced_subgraph(ga, keep_a);
    out.b = induced_subgraph(gb, keep_b);
    out.truth.resize(keep_a.size());
    for (std::size_t i = 0; i < keep_a.size(); ++i) out.truth[i] = static_cast<int>(i);
    return out;
}

/// Reads integer `u,image` rows (further columns ignored). A first line that
/// does not start with a digit is treated as a header.
inline std::vector<std::pair<int, int>> read_index_pairs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<int, int>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && !std::isdigit(static_cast<unsigned char>(line[0]))) continue;
        std::istringstream cells(line);
        std::string a, b;
        if (!std::getline(cells, a, ',') || !std::getline(cells, b, ',')) throw ParseError(path, line_no, "expected u,image");
        try {
            std::size_t used_a = 0, used_b = 0;
            const int u = std::stoi(a, &used_a);
            const int v = std::stoi(b, &used_b);
            if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing characters");
            out.emplace_back(u, v);
        } catch (const std::exception&) {
            throw ParseError(path, line_no, "expected integer u,image");
        }
    }
    return out;
}

/// Reads `label_a,label_b` rows; a first row that starts with '#' or equals a
/// header is skipped by the caller's convention of '#' comments.
inline std::vector<std::pair<std::string, std::string>> read_correspondence_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path, line_no, "expected label_a,label_b");
        out.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    return out;
}

}  // namespace sgm
