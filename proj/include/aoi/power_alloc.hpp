#pragma once

// Per-slot power allocation for the K-user NOMA downlink: the outage-weighted
// reward terms G_k, their concave envelope, the convex-envelope maximization
// over the weighted budget simplex intersected with the nonincreasing cone,
// subset/K enumeration, the e^-2 gap certificate, and a grid brute-force
// oracle used for validation.

#include <cstddef>
#include <vector>

#include "aoi/channel.hpp"

namespace aoi {

/// One subset-restricted allocation problem. Index k runs over the served set
/// in decoding order; coefficients c_k = w_{m(k)} * age_{m(k)} and scales
/// s_k = d_{m(k)}^tau * r * sigma^2. Scales must be strictly decreasing
/// (distances decrease along the decoding order).
struct AllocInstance {
    std::vector<int> servedSet;       ///< client indices, strictly increasing
    std::vector<double> coefficients;  ///< c_k >= 0
    std::vector<double> scales;        ///< s_k > 0, strictly decreasing
    double budget = 1.0;               ///< pbar > 0
    double rateFactor = 1.0;           ///< r = 2^R - 1

    std::size_t size() const { return coefficients.size(); }
    /// Budget weight of coordinate k: (r+1)^k.
    double budgetWeight(std::size_t k) const;
    void validate() const;

    /// Builds the instance for a served subset of the channel's clients.
    /// Requires strictly decreasing distances along the subset.
    static AllocInstance fromChannel(const ChannelParams& channel,
                                     const std::vector<double>& weights,
                                     const std::vector<int>& ages,
                                     const std::vector<int>& servedSet);
};

/// Solution of the envelope problem plus its certificates.
struct AllocSolution {
    std::vector<double> hatPowers;     ///< feasible, nonincreasing, >= 0
    double envelopeValue = 0.0;        ///< objective of the envelope problem at hatPowers
    double trueValue = 0.0;            ///< original objective at hatPowers
    double gapCertificate = 0.0;       ///< e^-2 sum c_k
    double optimalityResidual = 0.0;   ///< scaled projected-gradient residual
    std::size_t iterations = 0;
};

/// Reward term G(phat) = c exp(-s/phat) for phat > 0, with G(0) = 0.
/// Strictly increasing, limit c as phat -> infinity.
double g_value(double hatPower, double coefficient, double scale);

/// Concave envelope of g_value: the tangent line through the origin on
/// [0, s) (tangency at phat = s) and the function itself on [s, infinity).
/// Continuously differentiable at the tangency point and >= g_value
/// pointwise.
double g_tilde(double hatPower, double coefficient, double scale);

/// Euclidean projection onto {x : x_1 >= ... >= x_K >= 0,
/// sum_k b_k x_k <= budget}. Pool-adjacent-violators for the monotone cone
/// (clipped at zero) combined with bisection on the budget multiplier.
std::vector<double> project_capped_monotone(const std::vector<double>& point,
                                            const std::vector<double>& budgetWeights,
                                            double budget);

/// Maximizes the envelope objective sum_k g_tilde(phat_k; c_k, s_k) over the
/// feasible set above via projected gradient ascent (Barzilai-Borwein step
/// with Armijo backtracking). Deterministic given the instance. Throws
/// ConvergenceError (see two_client_mdp.hpp) when the scaled residual has not
/// reached `residualTol` within `maxIters`.
AllocSolution solve_problem8(const AllocInstance& inst, double residualTol = 1e-8,
                             std::size_t maxIters = 100'000);

/// Original (non-envelope) objective at an arbitrary nonnegative point:
/// sum_k c_k exp(-s_k max_{t<=k} 1/phat_t); a zero hat power anywhere in the
/// prefix zeroes the term. Equals sum_k g_value(phat_k) on nonincreasing
/// points.
double evaluate_true_objective(const std::vector<double>& hatPowers, const AllocInstance& inst);

/// Corollary-style suboptimality certificate e^-2 sum_k c_k.
double gap_bound(const AllocInstance& inst);

/// Winner of the full enumeration: served clients (zero-power coordinates
/// dropped), raw powers, the envelope solution of the winning subset and the
/// number of clients actually served.
struct AllocationResult {
    std::vector<int> served;         ///< client indices, strictly increasing
    std::vector<double> rawPowers;   ///< aligned with served
    AllocSolution solution;          ///< solution on the winning subset
    std::vector<int> winningSubset;  ///< subset the solver ran on (before drops)
    double trueObjective = 0.0;      ///< original objective of the winner
};

/// Loops K = 1..N and every K-subset, solves the envelope problem per subset
/// and ranks candidates by the original objective at the envelope solution.
/// Ties break toward smaller K, then the lexicographically smallest subset.
/// Zero-power coordinates of the winner are reported as unserved. Throws
/// std::invalid_argument when the client count exceeds `maxClients`
/// (the enumeration is exponential in N).
AllocationResult enumerate_allocate(const std::vector<int>& ages,
                                    const std::vector<double>& weights,
                                    const ChannelParams& channel, int maxClients = 12);

/// Same enumeration restricted to subsets of exactly K clients.
AllocationResult enumerate_allocate_fixed_k(const std::vector<int>& ages,
                                            const std::vector<double>& weights,
                                            const ChannelParams& channel, int servedCount,
                                            int maxClients = 12);

struct BruteForceResult {
    double value = 0.0;
    std::vector<double> hatPowers;
};

/// Exhaustive grid maximization of the original objective over the feasible
/// polytope, restricted to the tight-budget face (scaling any feasible point
/// up to the budget never decreases the objective, so the optimum lives
/// there). The last coordinate absorbs the remaining budget, capped by the
/// ordering constraint when `enforceOrdering` is set. Refining the step by an
/// integer factor never lowers the returned value. K <= 3 only.
BruteForceResult brute_force_problem7(const AllocInstance& inst, double gridStep,
                                      bool enforceOrdering = true);

/// Conservative bound on how far the grid optimum can fall below the
/// continuous optimum: per-coordinate Lipschitz constant of the original
/// objective (4 c_k e^-2 / s_k summed) times K times the step.
double grid_error_bound(const AllocInstance& inst, double gridStep);

}  // namespace aoi
