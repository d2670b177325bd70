#pragma once

// Per-slot decision policies: the two-client max-weight rule over the
// discrete action set, the multi-client adaptive NOMA/OMA policy backed by
// the envelope allocator, the single-client max-weight OMA baseline, the
// fixed-K NOMA variant and a grid-search oracle.

#include <cstddef>
#include <list>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "aoi/channel.hpp"
#include "aoi/power_alloc.hpp"
#include "aoi/two_client_mdp.hpp"

namespace aoi {

/// System state: one age per client plus the client weights.
struct AoIState {
    std::vector<int> ages;        ///< positive integers
    std::vector<double> weights;  ///< nonnegative, sum 1 (within 1e-12)

    std::size_t numClients() const { return ages.size(); }
    void validate() const;
};

/// OMA choice: one client served at full budget.
struct OmaChoice {
    int client = 0;
};

/// One scheduling decision together with the value of the one-slot expected
/// weighted age drop (sum_i w_i (1 - P_i) age_i - 1) it attains.
struct Decision {
    std::variant<OmaChoice, PowerAllocation, TwoClientAction> choice;
    double expectedDrop = 0.0;

    bool isOma() const { return std::holds_alternative<OmaChoice>(choice); }
    std::string encode() const;  ///< compact trace encoding
};

/// Precomputed two-client decision context: the reduced action set and its
/// outage table for a fixed channel.
struct TwoClientContext {
    ChannelParams channel;
    std::vector<TwoClientAction> actions;  ///< reduced (eliminated) set
    TwoClientOutageTable outages;

    static TwoClientContext make(const ChannelParams& channel, int levels);
};

/// One-slot expected weighted age drop of a two-client action:
/// w1 (1-P1^O) d1 - 1 for OMA to client 1, w2 (1-P2^O) d2 - 1 for OMA to
/// client 2, w1 (1-P1^N) d1 + w2 (1-P2^N) d2 - 1 for a NOMA split.
double expected_drop2(const AoIState& state, const TwoClientAction& action,
                      const std::array<double, 2>& outage);

/// Argmax of expected_drop2 over the reduced action set; ties break toward
/// the smallest action index.
TwoClientAction two_client_maxweight(const AoIState& state, const TwoClientContext& ctx);

/// Full decision table of the max-weight rule over the truncated grid
/// (used for structure checks and fast simulation).
ActionGrid two_client_maxweight_grid(const TwoClientContext& ctx,
                                     const std::vector<double>& weights, int deltaMax);

/// Serves the single client maximizing w_i (1-P_i^O) age_i at full budget;
/// ties break toward the lowest index.
Decision mw_oma(const AoIState& state, const ChannelParams& channel);

/// Best allocation serving exactly `servedCount` clients (subset enumeration
/// plus the envelope solve, ranked by the original objective).
Decision fixed_k_noma(const AoIState& state, const ChannelParams& channel, int servedCount);

/// Full adaptive policy: best K and subset by the original objective.
Decision adaptive_noma_oma(const AoIState& state, const ChannelParams& channel);

/// Grid-search oracle over per-client raw power splits on the simplex
/// {sum p_i <= pbar} at resolution pbar/gridLevels, scoring each split by the
/// exact SIC outage model. Guard: at most 4 clients. gridLevels >= 10.
Decision exhaustive_mw(const AoIState& state, const ChannelParams& channel, int gridLevels);

/// Bounded LRU memo for per-state decisions; one instance per worker (not
/// synchronized). Keyed by the age vector: an instance is bound to one
/// channel and weight vector.
class DecisionCache {
public:
    explicit DecisionCache(std::size_t capacity = 1 << 18) : capacity_(capacity) {}

    const Decision* find(const std::vector<int>& ages);
    void insert(const std::vector<int>& ages, Decision decision);
    std::size_t size() const { return map_.size(); }

private:
    struct Entry {
        std::vector<int> key;
        Decision decision;
    };
    std::size_t capacity_;
    std::list<Entry> lru_;  // front = most recent
    struct VecHash {
        std::size_t operator()(const std::vector<int>& v) const;
    };
    std::unordered_map<std::vector<int>, std::list<Entry>::iterator, VecHash> map_;
};

}  // namespace aoi
