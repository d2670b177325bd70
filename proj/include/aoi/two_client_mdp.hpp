#pragma once

// Exact two-client scheduling MDP on the truncated age grid: reduced action
// space, transition kernel, relative value iteration for the long-run average
// weighted age, switching-structure verification and boundary extraction.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aoi/channel.hpp"

namespace aoi {

/// One discrete power split. index a in {0..levels}: a = 0 is OMA to client 1
/// (near), a = levels is OMA to client 2 (far), anything in between is NOMA
/// with alpha2 = a / levels of the budget on the far client.
struct TwoClientAction {
    int index = 0;
    int levels = 1;

    bool isOmaNear() const { return index == 0; }
    bool isOmaFar() const { return index == levels; }
    bool isNoma() const { return index != 0 && index != levels; }
    double alpha2() const { return static_cast<double>(index) / levels; }

    friend bool operator==(const TwoClientAction&, const TwoClientAction&) = default;
};

/// Action set {0, aMin, aMin+1, ..., L}. Without elimination
/// aMin = max(ceil(L/2)+1, ceil((2^R-1) L / 2^R)); elimination additionally
/// drops every NOMA split below floor(2^R L / (2^R+1)), which is dominated
/// (both outage curves are still decreasing there). The eliminated set is
/// always a subset of the raw one.
std::vector<TwoClientAction> build_action_space(int levels, double targetRate, bool eliminate);

/// Per-action outage probabilities for both clients. OMA rows carry the
/// served client's OMA outage and 1 for the idle client, which makes the
/// four-successor product form collapse to the exact two-successor OMA
/// kernel. Tests inject synthetic tables; production code builds one from
/// the channel model.
struct TwoClientOutageTable {
    std::vector<TwoClientAction> actions;
    std::vector<std::array<double, 2>> outage;  ///< aligned with actions; [client1, client2]

    std::size_t size() const { return actions.size(); }

    /// Evaluates Eqs. of the channel model for every action in the set.
    /// Expects channel.distances = {d1 (near), d2 (far)}.
    static TwoClientOutageTable fromChannel(const ChannelParams& channel,
                                            const std::vector<TwoClientAction>& actions);
};

struct MdpConfig {
    std::vector<double> weights{0.5, 0.5};  ///< (w1, w2), nonnegative, sum 1
    int deltaMax = 100;                     ///< ages clamp (saturate) at this bound
    double spanTol = 1e-9;                  ///< stop when span(V_{n+1}-V_n) < spanTol
    std::int64_t maxIters = 1'000'000;
    std::pair<int, int> refState{1, 1};     ///< RVI normalization state
    double damping = 0.5;                   ///< aperiodicity factor kappa in (0,1]

    void validate() const;
};

/// Action indices over the truncated grid {1..deltaMax}^2, row-major in
/// (delta1, delta2).
struct ActionGrid {
    int deltaMax = 0;
    std::vector<int> actions;  ///< size deltaMax^2; value = action index a

    int at(int delta1, int delta2) const {
        return actions[static_cast<std::size_t>(delta1 - 1) * deltaMax + (delta2 - 1)];
    }
    int& at(int delta1, int delta2) {
        return actions[static_cast<std::size_t>(delta1 - 1) * deltaMax + (delta2 - 1)];
    }
    /// Lookup with saturation for states beyond the truncation.
    int clamped(int delta1, int delta2) const;

    friend bool operator==(const ActionGrid&, const ActionGrid&) = default;
};

/// Output of the solver: greedy policy, optimal average weighted age and the
/// relative value function h (normalized to h(ref) = 0).
struct PolicyTable {
    ActionGrid grid;
    double averageCost = 0.0;          ///< J*
    std::vector<double> relativeValues;  ///< h(delta1, delta2), same layout as grid
    int levels = 0;                    ///< L, echoed for serialization
    std::int64_t iterations = 0;
    double finalSpan = 0.0;

    double valueAt(int delta1, int delta2) const {
        return relativeValues[static_cast<std::size_t>(delta1 - 1) * grid.deltaMax +
                              (delta2 - 1)];
    }
};

/// One transition: successor state and its probability.
struct Transition {
    int delta1 = 1;
    int delta2 = 1;
    double probability = 0.0;
};

/// Successor distribution of (delta1, delta2) under the action, ages clamped
/// at deltaMax. OMA actions yield two successors, NOMA actions four (the
/// both-fail mass is emitted last as the exact complement, so the masses sum
/// to 1.0 bit-exactly when accumulated in order).
std::vector<Transition> transition_kernel(int delta1, int delta2, const TwoClientAction& action,
                                          const std::array<double, 2>& outage, int deltaMax);

/// Thrown when an iterative solve hits its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Relative value iteration for the long-run average weighted age.
///
/// Runs the damped Bellman operator normalized at config.refState until the
/// span seminorm of successive value differences drops below spanTol. The
/// returned relativeValues satisfy the undamped optimality equation
/// J* + h(s) = min_a [w1 d1 + w2 d2 + E h(s')] up to spanTol. Deterministic;
/// greedy ties break toward the smallest action index. Throws
/// ConvergenceError if maxIters is exceeded.
PolicyTable rvi_solve(const MdpConfig& config, const TwoClientOutageTable& outages);

/// Result of checking the switching structure: the action must be
/// nondecreasing in delta2 at fixed delta1 and nonincreasing in delta1 at
/// fixed delta2 (numeric order of action indices).
struct SwitchingReport {
    struct Violation {
        int delta1a, delta2a, actionA;
        int delta1b, delta2b, actionB;
    };
    std::vector<Violation> violations;
    bool pass() const { return violations.empty(); }
};

SwitchingReport verify_switching(const ActionGrid& grid);

/// Per-row decision boundaries. Row delta1 starts at baseAction for delta2=1;
/// steps lists (delta2 threshold, action) where the action changes. The grid
/// is exactly reconstructible from this.
struct BoundaryRow {
    int delta1 = 1;
    int baseAction = 0;
    std::vector<std::pair<int, int>> steps;
};

/// Throws std::logic_error if any row is not nondecreasing in delta2
/// (boundaries are ill-defined then). Rows with no change produce no steps; a
/// constant grid yields rows with empty step lists.
std::vector<BoundaryRow> extract_boundaries(const ActionGrid& grid);

/// Inverse of extract_boundaries.
ActionGrid reconstruct_from_boundaries(const std::vector<BoundaryRow>& rows, int deltaMax);

/// Flat text format: "# key value" header lines, then one "d1,d2,a" line per
/// state in row-major order.
void write_policy(std::ostream& out, const PolicyTable& table);
PolicyTable read_policy(std::istream& in);

/// Boundary export, one "d1,a0[,t:a]*" line per row.
void write_boundaries(std::ostream& out, const std::vector<BoundaryRow>& rows);

}  // namespace aoi
