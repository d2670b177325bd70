#include "aoi/two_client_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace aoi {

std::vector<TwoClientAction> build_action_space(int levels, double targetRate, bool eliminate) {
    if (levels < 2) throw std::invalid_argument("levels must be >= 2");
    if (!(targetRate > 0.0)) throw std::invalid_argument("targetRate must be > 0");
    const double twoR = std::exp2(targetRate);
    // Raw NOMA start: alpha2 must exceed both 1/2 and (2^R-1)/2^R.
    const int rawStart = std::max(static_cast<int>(std::ceil(levels / 2.0)) + 1,
                                  static_cast<int>(std::ceil((twoR - 1.0) * levels / twoR)));
    int start = rawStart;
    if (eliminate) {
        // Splits below floor(2^R L / (2^R+1)) are dominated: both outage
        // curves are still decreasing in a there.
        const int elimStart = static_cast<int>(std::floor(twoR * levels / (twoR + 1.0)));
        start = std::max(start, elimStart);
    }
    std::vector<TwoClientAction> actions;
    actions.push_back({0, levels});
    for (int a = std::min(start, levels); a <= levels; ++a) actions.push_back({a, levels});
    return actions;
}

TwoClientOutageTable TwoClientOutageTable::fromChannel(
    const ChannelParams& channel, const std::vector<TwoClientAction>& actions) {
    channel.validate();
    if (channel.numClients() != 2) {
        throw std::invalid_argument("two-client outage table requires exactly 2 distances");
    }
    const double d1 = channel.distances[0];
    const double d2 = channel.distances[1];
    TwoClientOutageTable table;
    table.actions = actions;
    table.outage.reserve(actions.size());
    for (const auto& action : actions) {
        if (action.isOmaNear()) {
            table.outage.push_back({oma_outage(d1, channel), 1.0});
        } else if (action.isOmaFar()) {
            table.outage.push_back({1.0, oma_outage(d2, channel)});
        } else {
            const double alpha2 = action.alpha2();
            table.outage.push_back({noma2_outage_near(alpha2, d1, channel),
                                    noma2_outage_far(alpha2, d2, channel)});
        }
    }
    return table;
}

void MdpConfig::validate() const {
    if (weights.size() != 2) throw std::invalid_argument("exactly two weights required");
    if (weights[0] < 0.0 || weights[1] < 0.0 ||
        std::abs(weights[0] + weights[1] - 1.0) > 1e-12) {
        throw std::invalid_argument("weights must be nonnegative and sum to 1");
    }
    if (deltaMax < 2) throw std::invalid_argument("deltaMax must be >= 2");
    if (!(spanTol > 0.0)) throw std::invalid_argument("spanTol must be > 0");
    if (maxIters < 1) throw std::invalid_argument("maxIters must be >= 1");
    if (refState.first < 1 || refState.first > deltaMax || refState.second < 1 ||
        refState.second > deltaMax) {
        throw std::invalid_argument("refState outside the truncated grid");
    }
    if (!(damping > 0.0) || damping > 1.0) throw std::invalid_argument("damping must be in (0,1]");
}

int ActionGrid::clamped(int delta1, int delta2) const {
    delta1 = std::clamp(delta1, 1, deltaMax);
    delta2 = std::clamp(delta2, 1, deltaMax);
    return at(delta1, delta2);
}

std::vector<Transition> transition_kernel(int delta1, int delta2, const TwoClientAction& action,
                                          const std::array<double, 2>& outage, int deltaMax) {
    if (delta1 < 1 || delta1 > deltaMax || delta2 < 1 || delta2 > deltaMax) {
        throw std::invalid_argument("state outside the truncated grid");
    }
    const int up1 = std::min(delta1 + 1, deltaMax);
    const int up2 = std::min(delta2 + 1, deltaMax);
    std::vector<Transition> out;
    if (action.isOmaNear()) {
        const double success = 1.0 - outage[0];
        out.push_back({1, up2, success});
        out.push_back({up1, up2, 1.0 - success});
    } else if (action.isOmaFar()) {
        const double success = 1.0 - outage[1];
        out.push_back({up1, 1, success});
        out.push_back({up1, up2, 1.0 - success});
    } else {
        const double p1 = outage[0], p2 = outage[1];
        const double bothOk = (1.0 - p1) * (1.0 - p2);
        const double onlyNear = (1.0 - p1) * p2;
        const double onlyFar = p1 * (1.0 - p2);
        // Complement emitted last so the masses sum to 1.0 exactly when
        // accumulated in this order.
        const double bothFail = 1.0 - (bothOk + onlyNear + onlyFar);
        out.push_back({1, 1, bothOk});
        out.push_back({1, up2, onlyNear});
        out.push_back({up1, 1, onlyFar});
        out.push_back({up1, up2, bothFail});
    }
    return out;
}

namespace {

// Successor indices shared by every action: both ages up, client-1 reset,
// client-2 reset, both reset (index 0).
struct SuccessorIndices {
    std::vector<int> up;      // (min(d1+1,D), min(d2+1,D))
    std::vector<int> reset1;  // (1, min(d2+1,D))
    std::vector<int> reset2;  // (min(d1+1,D), 1)
};

SuccessorIndices build_successors(int deltaMax) {
    const int n = deltaMax * deltaMax;
    SuccessorIndices s;
    s.up.resize(n);
    s.reset1.resize(n);
    s.reset2.resize(n);
    for (int d1 = 1; d1 <= deltaMax; ++d1) {
        const int u1 = std::min(d1 + 1, deltaMax);
        for (int d2 = 1; d2 <= deltaMax; ++d2) {
            const int u2 = std::min(d2 + 1, deltaMax);
            const int idx = (d1 - 1) * deltaMax + (d2 - 1);
            s.up[idx] = (u1 - 1) * deltaMax + (u2 - 1);
            s.reset1[idx] = u2 - 1;                   // (1, u2)
            s.reset2[idx] = (u1 - 1) * deltaMax;      // (u1, 1)
        }
    }
    return s;
}

// Per-action masses on (both reset, reset1, reset2, both up).
struct ActionMasses {
    double bothReset, reset1, reset2, up;
};

ActionMasses masses_for(const TwoClientAction& action, const std::array<double, 2>& outage) {
    if (action.isOmaNear()) {
        const double p = outage[0];
        return {0.0, 1.0 - p, 0.0, p};
    }
    if (action.isOmaFar()) {
        const double p = outage[1];
        return {0.0, 0.0, 1.0 - p, p};
    }
    const double p1 = outage[0], p2 = outage[1];
    return {(1.0 - p1) * (1.0 - p2), (1.0 - p1) * p2, p1 * (1.0 - p2), p1 * p2};
}

}  // namespace

PolicyTable rvi_solve(const MdpConfig& config, const TwoClientOutageTable& outages) {
    config.validate();
    if (outages.actions.empty()) throw std::invalid_argument("empty action set");
    for (const auto& o : outages.outage) {
        if (!(o[0] >= 0.0 && o[0] <= 1.0 && o[1] >= 0.0 && o[1] <= 1.0)) {
            throw std::invalid_argument("outage probabilities must lie in [0,1]");
        }
    }

    const int D = config.deltaMax;
    const int n = D * D;
    const std::size_t numActions = outages.size();
    const SuccessorIndices succ = build_successors(D);

    std::vector<ActionMasses> masses(numActions);
    for (std::size_t a = 0; a < numActions; ++a) {
        masses[a] = masses_for(outages.actions[a], outages.outage[a]);
    }

    std::vector<double> cost(n);
    for (int d1 = 1; d1 <= D; ++d1) {
        for (int d2 = 1; d2 <= D; ++d2) {
            cost[(d1 - 1) * D + (d2 - 1)] = config.weights[0] * d1 + config.weights[1] * d2;
        }
    }

    const int refIdx = (config.refState.first - 1) * D + (config.refState.second - 1);
    const double kappa = config.damping;

    std::vector<double> value(n, 0.0), next(n);
    double span = std::numeric_limits<double>::infinity();
    double gain = 0.0;
    std::int64_t iter = 0;
    for (; iter < config.maxIters; ++iter) {
        double spanLo = std::numeric_limits<double>::infinity();
        double spanHi = -spanLo;
        for (int s = 0; s < n; ++s) {
            const double vUp = value[succ.up[s]];
            const double vR1 = value[succ.reset1[s]];
            const double vR2 = value[succ.reset2[s]];
            const double vRR = value[0];
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < numActions; ++a) {
                const ActionMasses& m = masses[a];
                const double q = m.bothReset * vRR + m.reset1 * vR1 + m.reset2 * vR2 + m.up * vUp;
                best = std::min(best, q);
            }
            const double w = cost[s] + (1.0 - kappa) * value[s] + kappa * best;
            const double diff = w - value[s];
            spanLo = std::min(spanLo, diff);
            spanHi = std::max(spanHi, diff);
            next[s] = w;
        }
        span = spanHi - spanLo;
        gain = next[refIdx];
        for (int s = 0; s < n; ++s) next[s] -= gain;
        value.swap(next);
        if (span < config.spanTol) break;
    }
    if (span >= config.spanTol) {
        throw ConvergenceError("relative value iteration did not converge within " +
                                   std::to_string(config.maxIters) +
                                   " iterations (span = " + std::to_string(span) + ")",
                               span);
    }

    PolicyTable table;
    table.grid.deltaMax = D;
    table.grid.actions.resize(n);
    table.relativeValues.resize(n);
    table.averageCost = gain;
    table.levels = outages.actions.front().levels;
    table.iterations = iter + 1;
    table.finalSpan = span;
    for (int s = 0; s < n; ++s) {
        const double vUp = value[succ.up[s]];
        const double vR1 = value[succ.reset1[s]];
        const double vR2 = value[succ.reset2[s]];
        const double vRR = value[0];
        double best = std::numeric_limits<double>::infinity();
        std::size_t bestA = 0;
        for (std::size_t a = 0; a < numActions; ++a) {
            const ActionMasses& m = masses[a];
            const double q = m.bothReset * vRR + m.reset1 * vR1 + m.reset2 * vR2 + m.up * vUp;
            if (q < best) {
                best = q;
                bestA = a;
            }
        }
        table.grid.actions[s] = outages.actions[bestA].index;
        // Undo the damping so the stored values satisfy the original
        // optimality equation J* + h = min_a (cost + E h).
        table.relativeValues[s] = kappa * value[s];
    }
    return table;
}

SwitchingReport verify_switching(const ActionGrid& grid) {
    SwitchingReport report;
    const int D = grid.deltaMax;
    for (int d1 = 1; d1 <= D; ++d1) {
        for (int d2 = 1; d2 < D; ++d2) {
            const int a = grid.at(d1, d2);
            const int b = grid.at(d1, d2 + 1);
            if (b < a) report.violations.push_back({d1, d2, a, d1, d2 + 1, b});
        }
    }
    for (int d2 = 1; d2 <= D; ++d2) {
        for (int d1 = 1; d1 < D; ++d1) {
            const int a = grid.at(d1, d2);
            const int b = grid.at(d1 + 1, d2);
            if (b > a) report.violations.push_back({d1, d2, a, d1 + 1, d2, b});
        }
    }
    return report;
}

std::vector<BoundaryRow> extract_boundaries(const ActionGrid& grid) {
    std::vector<BoundaryRow> rows;
    rows.reserve(grid.deltaMax);
    for (int d1 = 1; d1 <= grid.deltaMax; ++d1) {
        BoundaryRow row;
        row.delta1 = d1;
        row.baseAction = grid.at(d1, 1);
        int current = row.baseAction;
        for (int d2 = 2; d2 <= grid.deltaMax; ++d2) {
            const int a = grid.at(d1, d2);
            if (a < current) {
                throw std::logic_error("action decreases in delta2 at (" + std::to_string(d1) +
                                       "," + std::to_string(d2) + "); boundaries are ill-defined");
            }
            if (a != current) {
                row.steps.emplace_back(d2, a);
                current = a;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ActionGrid reconstruct_from_boundaries(const std::vector<BoundaryRow>& rows, int deltaMax) {
    ActionGrid grid;
    grid.deltaMax = deltaMax;
    grid.actions.assign(static_cast<std::size_t>(deltaMax) * deltaMax, 0);
    for (const auto& row : rows) {
        int current = row.baseAction;
        std::size_t nextStep = 0;
        for (int d2 = 1; d2 <= deltaMax; ++d2) {
            while (nextStep < row.steps.size() && row.steps[nextStep].first == d2) {
                current = row.steps[nextStep].second;
                ++nextStep;
            }
            grid.at(row.delta1, d2) = current;
        }
    }
    return grid;
}

void write_policy(std::ostream& out, const PolicyTable& table) {
    out << "# delta_max " << table.grid.deltaMax << "\n";
    out << "# levels " << table.levels << "\n";
    out.precision(17);
    out << "# average_cost " << table.averageCost << "\n";
    for (int d1 = 1; d1 <= table.grid.deltaMax; ++d1) {
        for (int d2 = 1; d2 <= table.grid.deltaMax; ++d2) {
            out << d1 << ',' << d2 << ',' << table.grid.at(d1, d2) << "\n";
        }
    }
}

PolicyTable read_policy(std::istream& in) {
    PolicyTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "delta_max") {
                hs >> table.grid.deltaMax;
                table.grid.actions.assign(
                    static_cast<std::size_t>(table.grid.deltaMax) * table.grid.deltaMax, 0);
            } else if (key == "levels") {
                hs >> table.levels;
            } else if (key == "average_cost") {
                hs >> table.averageCost;
            }
            continue;
        }
        std::istringstream ls(line);
        int d1, d2, a;
        char comma;
        if (!(ls >> d1 >> comma >> d2 >> comma >> a)) {
            throw std::invalid_argument("malformed policy line: " + line);
        }
        if (table.grid.deltaMax == 0) throw std::invalid_argument("policy header missing");
        table.grid.at(d1, d2) = a;
    }
    return table;
}

void write_boundaries(std::ostream& out, const std::vector<BoundaryRow>& rows) {
    for (const auto& row : rows) {
        out << row.delta1 << ',' << row.baseAction;
        for (const auto& [threshold, action] : row.steps) {
            out << ',' << threshold << ':' << action;
        }
        out << "\n";
    }
}

}  // namespace aoi
