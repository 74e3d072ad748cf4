#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace degcausal {

/// Adjacency-matrix graph over k labelled variables.
///
/// adj(i,j)=1 and adj(j,i)=0 encodes a directed edge i->j; a symmetric pair
/// encodes an undirected edge i--j. Self-loops are rejected on construction.
/// Instances are values: the structural operations below never mutate inputs.
class CausalGraph {
public:
    CausalGraph() = default;
    explicit CausalGraph(int k);
    CausalGraph(int k, std::vector<std::string> labels);
    /// Throws ErrorKind::StructuralInput for non-square input, entries outside
    /// {0,1}, self-loops, or a label count that does not match k.
    CausalGraph(const std::vector<std::vector<int>>& adj, std::vector<std::string> labels = {});

    int k() const noexcept { return k_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    bool at(int i, int j) const { return adj_[index(i, j)] != 0; }
    bool adjacent(int i, int j) const { return at(i, j) || at(j, i); }
    bool directed(int i, int j) const { return at(i, j) && !at(j, i); }
    bool undirected(int i, int j) const { return at(i, j) && at(j, i); }

    void add_directed(int i, int j);
    void add_undirected(int i, int j);
    void remove_edge(int i, int j);
    /// Turns i--j into i->j; no-op when the pair is not undirected.
    void orient(int i, int j);

    int edge_count() const;
    bool has_undirected_edges() const;
    std::vector<int> parents(int j) const;   // directed only
    std::vector<int> children(int i) const;  // directed only
    std::vector<int> neighbors(int i) const; // undirected only
    std::vector<int> adjacents(int i) const;

    std::vector<std::vector<int>> matrix() const;

    friend bool operator==(const CausalGraph& a, const CausalGraph& b) {
        return a.k_ == b.k_ && a.adj_ == b.adj_;
    }

private:
    std::size_t index(int i, int j) const;

    int k_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<std::string> labels_;
};

/// Default labels X1..Xk.
std::vector<std::string> default_labels(int k);

enum class PairwiseOutcome { Empty, Forward, Backward, Undirected, Other };

const char* to_string(PairwiseOutcome outcome) noexcept;
constexpr int kPairwiseOutcomeCount = 5;

/// Separating sets keyed by unordered pair (stored with first < second).
class SepsetMap {
public:
    void set(int a, int b, std::vector<int> sepset);
    const std::vector<int>* find(int a, int b) const;
    bool contains(int a, int b, int node) const;

private:
    std::map<std::pair<int, int>, std::vector<int>> sets_;
};

/// True iff the directed part of g has no cycle; undirected pairs are ignored.
bool is_acyclic(const CausalGraph& g);

CausalGraph skeleton_of(const CausalGraph& g);

/// Orients unshielded colliders a->c<-b with c outside sepset(a,b), then
/// closes under Meek rules R1-R4. Conflicting collider demands leave the edge
/// undirected (Meek rules do not orient them either); an orientation that
/// would close a directed cycle is skipped.
CausalGraph orient_cpdag(const CausalGraph& skeleton, const SepsetMap& sepsets);

/// Applies Meek rules R1-R4 to a partially directed graph until fixpoint.
CausalGraph apply_meek_rules(CausalGraph g);

/// The completed PDAG representing the Markov equivalence class of a DAG.
CausalGraph cpdag_of_dag(const CausalGraph& dag);

/// A DAG consistent with a PDAG (Dor-Tarsi), or nullopt if none exists.
std::optional<CausalGraph> consistent_extension(const CausalGraph& pdag);

/// Throws ErrorKind::Comparison when dimension or labels differ.
bool graphs_equal(const CausalGraph& a, const CausalGraph& b);

/// Throws ErrorKind::Arity for k != 2.
PairwiseOutcome classify_pairwise(const CausalGraph& g);

}  // namespace degcausal
