#include "degcausal/graph.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "degcausal/error.hpp"

namespace degcausal {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::StructuralInput: return "structural_input";
        case ErrorKind::Comparison: return "comparison";
        case ErrorKind::Arity: return "arity";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Input: return "input";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::DegenerateInput: return "degenerate_input";
        case ErrorKind::TestInfeasible: return "test_infeasible";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Metric: return "metric";
        case ErrorKind::Config: return "config";
        case ErrorKind::EnumeratedChoice: return "enumerated_choice";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::MappingValidation: return "mapping_validation";
        case ErrorKind::Window: return "window";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

std::vector<std::string> default_labels(int k) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) labels.push_back("X" + std::to_string(i + 1));
    return labels;
}

CausalGraph::CausalGraph(int k) : CausalGraph(k, default_labels(k)) {}

CausalGraph::CausalGraph(int k, std::vector<std::string> labels)
    : k_(k), adj_(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0), labels_(std::move(labels)) {
    if (k < 0) throw Error(ErrorKind::StructuralInput, "negative variable count");
    if (static_cast<int>(labels_.size()) != k)
        throw Error(ErrorKind::StructuralInput, "label count does not match variable count");
}

CausalGraph::CausalGraph(const std::vector<std::vector<int>>& adj, std::vector<std::string> labels)
    : CausalGraph(static_cast<int>(adj.size()),
                  labels.empty() ? default_labels(static_cast<int>(adj.size())) : std::move(labels)) {
    for (int i = 0; i < k_; ++i) {
        if (static_cast<int>(adj[static_cast<std::size_t>(i)].size()) != k_)
            throw Error(ErrorKind::StructuralInput, "adjacency matrix is not square");
        for (int j = 0; j < k_; ++j) {
            const int v = adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (v != 0 && v != 1) {
                std::ostringstream msg;
                msg << "adjacency entry (" << i << "," << j << ") = " << v << " is not 0/1";
                throw Error(ErrorKind::StructuralInput, msg.str());
            }
            if (i == j && v != 0) throw Error(ErrorKind::StructuralInput, "self-loop on variable " + std::to_string(i));
            adj_[index(i, j)] = static_cast<std::uint8_t>(v);
        }
    }
}

std::size_t CausalGraph::index(int i, int j) const {
    if (i < 0 || j < 0 || i >= k_ || j >= k_) throw Error(ErrorKind::StructuralInput, "variable index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(j);
}

void CausalGraph::add_directed(int i, int j) {
    if (i == j) throw Error(ErrorKind::StructuralInput, "self-loop on variable " + std::to_string(i));
    adj_[index(i, j)] = 1;
    adj_[index(j, i)] = 0;
}

void CausalGraph::add_undirected(int i, int j) {
    if (i == j) throw Error(ErrorKind::StructuralInput, "self-loop on variable " + std::to_string(i));
    adj_[index(i, j)] = 1;
    adj_[index(j, i)] = 1;
}

void CausalGraph::remove_edge(int i, int j) {
    adj_[index(i, j)] = 0;
    adj_[index(j, i)] = 0;
}

void CausalGraph::orient(int i, int j) {
    if (undirected(i, j)) adj_[index(j, i)] = 0;
}

int CausalGraph::edge_count() const {
    int count = 0;
    for (int i = 0; i < k_; ++i)
        for (int j = i + 1; j < k_; ++j)
            if (adjacent(i, j)) ++count;
    return count;
}

bool CausalGraph::has_undirected_edges() const {
    for (int i = 0; i < k_; ++i)
        for (int j = i + 1; j < k_; ++j)
            if (undirected(i, j)) return true;
    return false;
}

std::vector<int> CausalGraph::parents(int j) const {
    std::vector<int> out;
    for (int i = 0; i < k_; ++i)
        if (directed(i, j)) out.push_back(i);
    return out;
}

std::vector<int> CausalGraph::children(int i) const {
    std::vector<int> out;
    for (int j = 0; j < k_; ++j)
        if (directed(i, j)) out.push_back(j);
    return out;
}

std::vector<int> CausalGraph::neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < k_; ++j)
        if (undirected(i, j)) out.push_back(j);
    return out;
}

std::vector<int> CausalGraph::adjacents(int i) const {
    std::vector<int> out;
    for (int j = 0; j < k_; ++j)
        if (adjacent(i, j)) out.push_back(j);
    return out;
}

std::vector<std::vector<int>> CausalGraph::matrix() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k_), std::vector<int>(static_cast<std::size_t>(k_), 0));
    for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = at(i, j) ? 1 : 0;
    return out;
}

const char* to_string(PairwiseOutcome outcome) noexcept {
    switch (outcome) {
        case PairwiseOutcome::Empty: return "empty";
        case PairwiseOutcome::Forward: return "x1->x2";
        case PairwiseOutcome::Backward: return "x2->x1";
        case PairwiseOutcome::Undirected: return "undirected";
        case PairwiseOutcome::Other: return "other";
    }
    return "other";
}

void SepsetMap::set(int a, int b, std::vector<int> sepset) {
    std::sort(sepset.begin(), sepset.end());
    sets_[{std::min(a, b), std::max(a, b)}] = std::move(sepset);
}

const std::vector<int>* SepsetMap::find(int a, int b) const {
    auto it = sets_.find({std::min(a, b), std::max(a, b)});
    return it == sets_.end() ? nullptr : &it->second;
}

bool SepsetMap::contains(int a, int b, int node) const {
    const auto* s = find(a, b);
    return s != nullptr && std::binary_search(s->begin(), s->end(), node);
}

namespace {

// Directed reachability from `from` to `to` along directed edges only.
bool directed_path_exists(const CausalGraph& g, int from, int to) {
    std::vector<char> seen(static_cast<std::size_t>(g.k()), 0);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (int w = 0; w < g.k(); ++w) {
            if (g.directed(v, w) && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    return false;
}

bool orient_if_safe(CausalGraph& g, int from, int to) {
    if (!g.undirected(from, to)) return false;
    if (directed_path_exists(g, to, from)) return false;
    g.orient(from, to);
    return true;
}

bool meek_r1(CausalGraph& g, int b, int c) {
    // a->b, b--c, a and c nonadjacent  =>  b->c
    for (int a = 0; a < g.k(); ++a)
        if (a != c && g.directed(a, b) && !g.adjacent(a, c)) return orient_if_safe(g, b, c);
    return false;
}

bool meek_r2(CausalGraph& g, int a, int b) {
    // a->c->b and a--b  =>  a->b
    for (int c = 0; c < g.k(); ++c)
        if (g.directed(a, c) && g.directed(c, b)) return orient_if_safe(g, a, b);
    return false;
}

bool meek_r3(CausalGraph& g, int a, int b) {
    // a--c->b, a--d->b, c and d nonadjacent  =>  a->b
    const int k = g.k();
    for (int c = 0; c < k; ++c) {
        if (!g.undirected(a, c) || !g.directed(c, b)) continue;
        for (int d = c + 1; d < k; ++d) {
            if (g.undirected(a, d) && g.directed(d, b) && !g.adjacent(c, d)) return orient_if_safe(g, a, b);
        }
    }
    return false;
}

bool meek_r4(CausalGraph& g, int a, int b) {
    // a--c->d->b, a adjacent d, c and b nonadjacent  =>  a->b
    const int k = g.k();
    for (int c = 0; c < k; ++c) {
        if (c == b || !g.undirected(a, c) || g.adjacent(c, b)) continue;
        for (int d = 0; d < k; ++d) {
            if (d == a || d == b || d == c) continue;
            if (g.directed(c, d) && g.directed(d, b) && g.adjacent(a, d)) return orient_if_safe(g, a, b);
        }
    }
    return false;
}

// Meek closure; pairs marked in `frozen` stay undirected.
CausalGraph meek_closure(CausalGraph g, const std::vector<std::vector<char>>& frozen) {
    const int k = g.k();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                if (a == b || !g.undirected(a, b)) continue;
                if (!frozen.empty() && frozen[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
                if (meek_r1(g, a, b) || meek_r2(g, a, b) || meek_r3(g, a, b) || meek_r4(g, a, b)) changed = true;
            }
        }
    }
    return g;
}

}  // namespace

bool is_acyclic(const CausalGraph& g) {
    // Kahn's algorithm over directed edges.
    const int k = g.k();
    std::vector<int> indegree(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (g.directed(i, j)) ++indegree[static_cast<std::size_t>(j)];
    std::vector<int> ready;
    for (int i = 0; i < k; ++i)
        if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    int visited = 0;
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        ++visited;
        for (int w = 0; w < k; ++w)
            if (g.directed(v, w) && --indegree[static_cast<std::size_t>(w)] == 0) ready.push_back(w);
    }
    return visited == k;
}

CausalGraph skeleton_of(const CausalGraph& g) {
    CausalGraph out(g.k(), g.labels());
    for (int i = 0; i < g.k(); ++i)
        for (int j = i + 1; j < g.k(); ++j)
            if (g.adjacent(i, j)) out.add_undirected(i, j);
    return out;
}

CausalGraph apply_meek_rules(CausalGraph g) { return meek_closure(std::move(g), {}); }

CausalGraph orient_cpdag(const CausalGraph& skeleton, const SepsetMap& sepsets) {
    CausalGraph g = skeleton_of(skeleton);
    const int k = g.k();

    // demand[a][c] = 1 when some unshielded collider requires a->c.
    std::vector<std::vector<char>> demand(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
    for (int c = 0; c < k; ++c) {
        for (int a = 0; a < k; ++a) {
            if (a == c || !g.adjacent(a, c)) continue;
            for (int b = a + 1; b < k; ++b) {
                if (b == c || !g.adjacent(b, c) || g.adjacent(a, b)) continue;
                const auto* sep = sepsets.find(a, b);
                if (sep == nullptr || std::binary_search(sep->begin(), sep->end(), c)) continue;
                demand[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = 1;
                demand[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = 1;
            }
        }
    }
    std::vector<std::vector<char>> conflict(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
    for (int a = 0; a < k; ++a) {
        for (int c = 0; c < k; ++c) {
            const bool forward = demand[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] != 0;
            const bool backward = demand[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] != 0;
            if (forward && !backward) orient_if_safe(g, a, c);
            if (forward && backward) conflict[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = 1;
        }
    }
    return meek_closure(std::move(g), conflict);
}

CausalGraph cpdag_of_dag(const CausalGraph& dag) {
    CausalGraph g = skeleton_of(dag);
    const int k = g.k();
    for (int c = 0; c < k; ++c) {
        const auto pa = dag.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!dag.adjacent(pa[x], pa[y])) {
                    g.orient(pa[x], c);
                    g.orient(pa[y], c);
                }
    }
    return apply_meek_rules(std::move(g));
}

std::optional<CausalGraph> consistent_extension(const CausalGraph& pdag) {
    CausalGraph work = pdag;
    CausalGraph out = pdag;
    const int k = pdag.k();
    std::vector<char> removed(static_cast<std::size_t>(k), 0);
    for (int step = 0; step < k; ++step) {
        int pick = -1;
        for (int x = 0; x < k && pick < 0; ++x) {
            if (removed[static_cast<std::size_t>(x)]) continue;
            bool sink = true;
            for (int y = 0; y < k && sink; ++y)
                if (!removed[static_cast<std::size_t>(y)] && work.directed(x, y)) sink = false;
            if (!sink) continue;
            bool ok = true;
            for (int y = 0; y < k && ok; ++y) {
                if (removed[static_cast<std::size_t>(y)] || !work.undirected(x, y)) continue;
                for (int z = 0; z < k && ok; ++z) {
                    if (z == y || z == x || removed[static_cast<std::size_t>(z)] || !work.adjacent(x, z)) continue;
                    if (!work.adjacent(y, z)) ok = false;
                }
            }
            if (ok) pick = x;
        }
        if (pick < 0) return std::nullopt;
        for (int y = 0; y < k; ++y) {
            if (!removed[static_cast<std::size_t>(y)] && work.undirected(pick, y)) out.orient(y, pick);
        }
        removed[static_cast<std::size_t>(pick)] = 1;
        for (int y = 0; y < k; ++y) work.remove_edge(pick, y);
    }
    return out;
}

bool graphs_equal(const CausalGraph& a, const CausalGraph& b) {
    if (a.k() != b.k()) throw Error(ErrorKind::Comparison, "graphs have different variable counts");
    if (a.labels() != b.labels()) throw Error(ErrorKind::Comparison, "graphs have different labels");
    return a == b;
}

PairwiseOutcome classify_pairwise(const CausalGraph& g) {
    if (g.k() != 2) throw Error(ErrorKind::Arity, "pairwise classification needs k=2, got k=" + std::to_string(g.k()));
    const bool f = g.at(0, 1);
    const bool r = g.at(1, 0);
    if (!f && !r) return PairwiseOutcome::Empty;
    if (f && !r) return PairwiseOutcome::Forward;
    if (!f && r) return PairwiseOutcome::Backward;
    return PairwiseOutcome::Undirected;
}

}  // namespace degcausal
