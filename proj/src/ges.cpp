#include <algorithm>
#include <map>
#include <sstream>

#include "degcausal/discovery.hpp"
#include "degcausal/error.hpp"
#include "degcausal/stats.hpp"

namespace degcausal {

namespace {

class CachedScore {
public:
    explicit CachedScore(const DataMatrix& m) : score_(m), cache_(static_cast<std::size_t>(m.cols())) {}

    double operator()(int child, std::vector<int> parents) {
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        auto& slot = cache_[static_cast<std::size_t>(child)];
        auto it = slot.find(parents);
        if (it != slot.end()) return it->second;
        double value = 0.0;
        try {
            value = score_.local_score(child, parents);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "ges: scoring child " << child << " with " << parents.size() << " parents: " << e.what();
            throw Error(e.kind(), msg.str());
        }
        slot.emplace(std::move(parents), value);
        return value;
    }

private:
    GaussianBicScore score_;
    std::vector<std::map<std::vector<int>, double>> cache_;
};

std::vector<int> set_union(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

bool is_clique(const CausalGraph& g, const std::vector<int>& nodes) {
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b)
            if (!g.adjacent(nodes[a], nodes[b])) return false;
    return true;
}

// Neighbours (undirected) of y that are adjacent to x.
std::vector<int> na_yx(const CausalGraph& g, int y, int x) {
    std::vector<int> out;
    for (int t : g.neighbors(y))
        if (t != x && g.adjacent(t, x)) out.push_back(t);
    return out;
}

// True when every semi-directed path from `from` to `to` meets `blocked`.
bool semi_directed_paths_blocked(const CausalGraph& g, int from, int to, const std::vector<int>& blocked) {
    const int k = g.k();
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (int b : blocked) seen[static_cast<std::size_t>(b)] = 1;
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < k; ++w) {
            if (!g.at(v, w)) continue;  // v->w or v--w
            if (w == to) return false;
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    return true;
}

std::vector<std::vector<int>> all_subsets(const std::vector<int>& pool) {
    std::vector<std::vector<int>> out;
    const std::size_t n = pool.size();
    const std::size_t count = std::size_t{1} << n;
    out.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<int> s;
        for (std::size_t b = 0; b < n; ++b)
            if (mask & (std::size_t{1} << b)) s.push_back(pool[b]);
        out.push_back(std::move(s));
    }
    return out;
}

CausalGraph complete_to_cpdag(const CausalGraph& pdag) {
    auto dag = consistent_extension(pdag);
    if (!dag) throw Error(ErrorKind::Numerical, "ges: operator produced a PDAG without consistent extension");
    return cpdag_of_dag(*dag);
}

struct Move {
    double delta = 0.0;
    int x = -1;
    int y = -1;
    std::vector<int> subset;
};

bool forward_step(CausalGraph& g, CachedScore& score) {
    const int k = g.k();
    Move best;
    for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) {
            if (x == y || g.adjacent(x, y)) continue;
            const std::vector<int> na = na_yx(g, y, x);
            std::vector<int> t0;
            for (int t : g.neighbors(y))
                if (!g.adjacent(t, x)) t0.push_back(t);
            const std::vector<int> pa = g.parents(y);
            for (const auto& t : all_subsets(t0)) {
                const std::vector<int> na_t = set_union(na, t);
                if (!is_clique(g, na_t)) continue;
                if (!semi_directed_paths_blocked(g, y, x, na_t)) continue;
                const std::vector<int> base = set_union(na_t, pa);
                const double delta = score(y, set_union(base, {x})) - score(y, base);
                if (delta > best.delta) best = Move{delta, x, y, t};
            }
        }
    }
    if (best.x < 0) return false;
    g.add_directed(best.x, best.y);
    for (int t : best.subset) g.orient(t, best.y);
    g = complete_to_cpdag(g);
    return true;
}

bool backward_step(CausalGraph& g, CachedScore& score) {
    const int k = g.k();
    Move best;
    for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) {
            if (x == y) continue;
            // Deletion of x->y or x--y; undirected pairs are visited from both ends.
            if (!g.directed(x, y) && !g.undirected(x, y)) continue;
            const std::vector<int> na = na_yx(g, y, x);
            const std::vector<int> pa = g.parents(y);
            for (const auto& h : all_subsets(na)) {
                std::vector<int> rest;
                for (int v : na)
                    if (!std::binary_search(h.begin(), h.end(), v)) rest.push_back(v);
                if (!is_clique(g, rest)) continue;
                std::vector<int> base = set_union(rest, pa);
                base.erase(std::remove(base.begin(), base.end(), x), base.end());
                const double delta = score(y, base) - score(y, set_union(base, {x}));
                if (delta > best.delta) best = Move{delta, x, y, h};
            }
        }
    }
    if (best.x < 0) return false;
    g.remove_edge(best.x, best.y);
    for (int h : best.subset) {
        g.orient(best.y, h);
        g.orient(best.x, h);
    }
    g = complete_to_cpdag(g);
    return true;
}

}  // namespace

DiscoveryResult ges(const DataMatrix& m, const GesConfig&) {
    const int k = m.cols();
    if (m.rows() <= k + 3) throw Error(ErrorKind::TestInfeasible, "ges: need more than k+3 rows");
    CachedScore score(m);
    CausalGraph g(k, m.labels);
    while (forward_step(g, score)) {
    }
    while (backward_step(g, score)) {
    }
    DiscoveryResult out;
    out.graph = g;
    out.is_dag = !g.has_undirected_edges();
    return out;
}

}  // namespace degcausal
