#include <algorithm>

#include "degcausal/discovery.hpp"
#include "degcausal/error.hpp"
#include "degcausal/stats.hpp"

namespace degcausal {

namespace {

// Calls fn(subset) for every size-`size` subset of `pool` in lexicographic order.
template <typename Fn>
void for_each_subset(const std::vector<int>& pool, int size, Fn&& fn) {
    const int n = static_cast<int>(pool.size());
    if (size > n) return;
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int s = 0; s < size; ++s) idx[static_cast<std::size_t>(s)] = s;
    std::vector<int> subset(static_cast<std::size_t>(size));
    while (true) {
        for (int s = 0; s < size; ++s) subset[static_cast<std::size_t>(s)] = pool[static_cast<std::size_t>(idx[static_cast<std::size_t>(s)])];
        fn(subset);
        int pos = size - 1;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - size + pos) --pos;
        if (pos < 0) return;
        ++idx[static_cast<std::size_t>(pos)];
        for (int s = pos + 1; s < size; ++s) idx[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(s - 1)] + 1;
    }
}

std::vector<int> without(std::vector<int> v, int x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
    return v;
}

}  // namespace

DiscoveryResult stable_pc(const DataMatrix& m, const PcConfig& cfg) {
    const int k = m.cols();
    if (m.rows() <= k + 3) throw Error(ErrorKind::TestInfeasible, "stable-pc: need more than k+3 rows");
    const PartialCorrelationKernel pcorr(m);

    CausalGraph g(k, m.labels);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) g.add_undirected(i, j);
    SepsetMap sepsets;

    for (int level = 0;; ++level) {
        // Neighbourhoods are frozen for the whole level, which makes edge
        // removal independent of the order in which pairs are visited.
        std::vector<std::vector<int>> frozen(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) frozen[static_cast<std::size_t>(i)] = g.adjacents(i);

        bool any_candidate = false;
        std::vector<std::pair<int, int>> removals;
        std::vector<std::vector<int>> removal_sets;
        for (int i = 0; i < k; ++i) {
            for (int j = i + 1; j < k; ++j) {
                if (!g.adjacent(i, j)) continue;
                double best_p = -1.0;
                std::vector<int> best_set;
                for (int side : {i, j}) {
                    const std::vector<int> pool = without(frozen[static_cast<std::size_t>(side)], side == i ? j : i);
                    if (static_cast<int>(pool.size()) < level) continue;
                    any_candidate = true;
                    for_each_subset(pool, level, [&](const std::vector<int>& cond) {
                        const double r = pcorr(i, j, cond);
                        const CITestResult t = fisher_z_test(r, m.rows(), level, cfg.alpha);
                        // Among separating sets keep the one with the largest
                        // p-value; ties go to the lexicographically smaller set.
                        if (t.independent) {
                            std::vector<int> sorted = cond;
                            std::sort(sorted.begin(), sorted.end());
                            if (t.p_value > best_p || (t.p_value == best_p && sorted < best_set)) {
                                best_p = t.p_value;
                                best_set = std::move(sorted);
                            }
                        }
                    });
                }
                if (best_p >= 0.0) {
                    removals.emplace_back(i, j);
                    removal_sets.push_back(best_set);
                }
            }
        }
        for (std::size_t r = 0; r < removals.size(); ++r) {
            g.remove_edge(removals[r].first, removals[r].second);
            sepsets.set(removals[r].first, removals[r].second, removal_sets[r]);
        }
        if (!any_candidate) break;
    }

    DiscoveryResult out;
    out.graph = orient_cpdag(g, sepsets);
    out.is_dag = !out.graph.has_undirected_edges();
    return out;
}

}  // namespace degcausal
