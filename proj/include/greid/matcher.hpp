#pragma once

#include <array>
#include <span>
#include <vector>

#include "greid/core.hpp"
#include "greid/importance.hpp"

namespace greid {

struct SolverConfig {
    int prune_k = 5;               // gallery candidates kept per probe person
    int unpruned_limit = 36;       // no pruning while N_p * N_g <= this
    double jump_prob = 0.2;        // mix of the reweighted (soft one-to-one) vector
    int max_rw_iters = 300;
    double rw_tol = 1e-6;
    double eps_dist = 1e-6;        // floor of every reciprocal distance
    int sinkhorn_iters = 50;
    double inflation = 0.0;        // reweighting uses exp(inflation * y / max y) when > 0

    void validate() const;
};

// Potential orders, indexing use_order / order_weight / marginals.
enum OrderIndex : int { kFirst = 0, kSecond = 1, kThird = 2, kGlobal = 3 };

// Unordered order pairs (r, l) of the inter-order potentials.
inline constexpr std::array<std::array<int, 2>, 6> kOrderPairs{
    {{kFirst, kSecond}, {kFirst, kThird}, {kFirst, kGlobal},
     {kSecond, kThird}, {kSecond, kGlobal}, {kThird, kGlobal}}};

struct MatchConfig {
    SolverConfig solver;
    double lambda_r = 0.5;                            // unmatched-object balance
    std::array<bool, 4> use_order{true, true, true, true};
    std::array<double, 4> order_weight{1.0, 1.0, 1.0, 1.0};
    bool inter_order = true;
    double similarity_threshold = 0.0;               // matched objects scoring below move to unmatched
    bool prune = true;
    bool relative_importance = true;   // weights divided by their order's mean within the image
    bool normalized_similarity = false;  // matched similarities in S carry the per-pair lambda_k
    bool importance_share = true;      // unmatched term uses each object's share of its order

    void validate() const;
};

/// Probe or gallery side of a pair: observation, features and importance weights.
struct GroupView {
    const GroupObservation& obs;
    const FeatureBundle& features;
    const ImportanceMap& weights;
};

/// (a + b) / (1 + |a - b|)
double fused_pair_weight(double a, double b);

/// (m_r + m_l) / (1 + |m_r - m_l|)
double inter_order_correlation(double m_r, double m_l);

struct PairEdge {
    std::array<int, 2> nodes;  // candidate indices
    double score;
};

struct TripleEdge {
    std::array<int, 3> nodes;
    double score;
};

/// Candidate matches of one probe-gallery pair with their multi-order affinities.
struct AssociationGraph {
    int n_probe = 0;
    int n_gallery = 0;
    std::vector<MatchCandidate> candidates;            // sorted by (probe, gallery)
    std::vector<int> cell;                             // n_probe*n_gallery -> candidate or -1
    std::vector<double> unary;                         // normalized first-order scores
    std::vector<PairEdge> pair_edges;                  // normalized second-order scores
    std::vector<TripleEdge> triple_edges;              // normalized third-order scores
    double global_affinity = 0.0;                      // w_g
    std::array<double, 3> lambda{0.0, 0.0, 0.0};       // per-pair normalizers of orders 1..3
    std::vector<std::array<double, 4>> marginals;      // accumulated per-order score per candidate
    std::vector<std::array<double, 6>> inter_order;    // m_rl per candidate, kOrderPairs order
    std::array<bool, 4> use_order{true, true, true, true};
    std::array<double, 4> order_weight{1.0, 1.0, 1.0, 1.0};

    int candidate_at(int probe_person, int gallery_person) const {
        return cell[static_cast<std::size_t>(probe_person * n_gallery + gallery_person)];
    }
    double inter_order_total(int candidate) const;
    /// Every per-candidate term: weighted unary + global share + inter-order terms.
    double node_potential(int candidate) const;
};

/// Raw (unnormalized) order-k score between a probe and a gallery object of equal order:
/// psi(alpha_p, alpha_g) / max(d_f, eps). Members are person indices; order is members.size().
double raw_order_score(const GroupView& probe, std::span<const int> probe_members,
                       const GroupView& gallery, std::span<const int> gallery_members, double eps_dist);

/// 1 / max(d_f(global_p, global_g), eps).
double global_score(const FeatureBundle& probe, const FeatureBundle& gallery, double eps_dist = 1e-6);

AssociationGraph build_association_graph(const GroupView& probe, const GroupView& gallery,
                                         const MatchConfig& cfg);

struct RandomWalkResult {
    std::vector<double> x;     // probability per candidate
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;   // every affinity zero; x is uniform
};

RandomWalkResult solve_rrw(const AssociationGraph& graph, const SolverConfig& cfg);

/// One-to-one mapping maximizing the summed probability over candidate cells.
Mapping extract_mapping(std::span<const double> x, const AssociationGraph& graph);

struct ObjectiveBreakdown {
    double first = 0.0;
    double second = 0.0;
    double third = 0.0;
    double global = 0.0;
    double inter = 0.0;

    double total() const { return first + second + third + global + inter; }
};

ObjectiveBreakdown objective_terms(const Mapping& mapping, const AssociationGraph& graph);
double objective_value(const Mapping& mapping, const AssociationGraph& graph);

struct ScoreBreakdown {
    double matched_term = 0.0;
    double unmatched_term = 0.0;
    std::size_t matched_objects = 0;
    std::size_t unmatched_probe = 0;
    std::size_t unmatched_gallery = 0;
};

/// Group similarity from the matched objects' similarities minus lambda_r times the mean
/// importance of unmatched probe and gallery objects.
double fused_matching_score(const Mapping& mapping, const GroupView& probe, const GroupView& gallery,
                            const AssociationGraph& graph, const MatchConfig& cfg,
                            ScoreBreakdown* breakdown = nullptr);

struct MatchResult {
    Mapping mapping;
    double objective = 0.0;
    double fused_score = 0.0;
    ObjectiveBreakdown per_order;
    ScoreBreakdown score_terms;
    int rw_iterations = 0;
    bool degenerate = false;
};

/// Weights as seen by the matcher: relative to their order's mean when configured.
ImportanceMap matching_weights(const ImportanceMap& weights, const MatchConfig& cfg);

MatchResult match_pair(const GroupView& probe, const GroupView& gallery, const MatchConfig& cfg);

}  // namespace greid
