#include "aoi/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aoi/two_client_mdp.hpp"  // ConvergenceError

namespace aoi {

double AllocInstance::budgetWeight(std::size_t k) const {
    return std::pow(rateFactor + 1.0, static_cast<double>(k));
}

void AllocInstance::validate() const {
    const std::size_t k = coefficients.size();
    if (k == 0) throw std::invalid_argument("empty allocation instance");
    if (scales.size() != k) throw std::invalid_argument("coefficients/scales size mismatch");
    if (!servedSet.empty() && servedSet.size() != k) {
        throw std::invalid_argument("servedSet size mismatch");
    }
    for (double c : coefficients) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("coefficients must be >= 0");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) {
            throw std::invalid_argument("scales must be > 0");
        }
        if (i > 0 && !(scales[i] < scales[i - 1])) {
            throw std::invalid_argument("scales must be strictly decreasing along decoding order");
        }
    }
    if (!(budget > 0.0)) throw std::invalid_argument("budget must be > 0");
    if (!(rateFactor > 0.0)) throw std::invalid_argument("rateFactor must be > 0");
}

AllocInstance AllocInstance::fromChannel(const ChannelParams& channel,
                                         const std::vector<double>& weights,
                                         const std::vector<int>& ages,
                                         const std::vector<int>& servedSet) {
    channel.validate();
    if (weights.size() != channel.numClients() || ages.size() != channel.numClients()) {
        throw std::invalid_argument("weights/ages must match the client count");
    }
    AllocInstance inst;
    inst.servedSet = servedSet;
    inst.budget = channel.powerBudget;
    inst.rateFactor = channel.rateFactor();
    inst.coefficients.reserve(servedSet.size());
    inst.scales.reserve(servedSet.size());
    for (int client : servedSet) {
        if (client < 0 || static_cast<std::size_t>(client) >= channel.numClients()) {
            throw std::invalid_argument("served client index out of range");
        }
        inst.coefficients.push_back(weights[client] * ages[client]);
        inst.scales.push_back(std::pow(channel.distances[client], channel.pathLossExp) *
                              inst.rateFactor * channel.noisePower);
    }
    inst.validate();
    return inst;
}

double g_value(double hatPower, double coefficient, double scale) {
    if (hatPower <= 0.0) return 0.0;
    return coefficient * std::exp(-scale / hatPower);
}

double g_tilde(double hatPower, double coefficient, double scale) {
    if (hatPower <= 0.0) return 0.0;
    if (hatPower < scale) {
        return coefficient * std::exp(-1.0) / scale * hatPower;
    }
    return coefficient * std::exp(-scale / hatPower);
}

namespace {

double g_tilde_grad(double hatPower, double coefficient, double scale) {
    if (hatPower < scale) return coefficient * std::exp(-1.0) / scale;
    const double inv = scale / hatPower;
    return coefficient * std::exp(-inv) * inv / hatPower;
}

// Nonincreasing isotonic regression (pool adjacent violators), then clipped
// at zero, which is the exact projection onto {x nonincreasing, x >= 0}.
std::vector<double> project_monotone_nonneg(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> mean(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = y[i];
        std::size_t c = 1;
        while (blocks > 0 && mean[blocks - 1] <= m) {
            m = (m * c + mean[blocks - 1] * count[blocks - 1]) / (c + count[blocks - 1]);
            c += count[blocks - 1];
            --blocks;
        }
        mean[blocks] = m;
        count[blocks] = c;
        ++blocks;
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double v = std::max(mean[b], 0.0);
        out.insert(out.end(), count[b], v);
    }
    return out;
}

double weighted_sum(const std::vector<double>& x, const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
    return s;
}

}  // namespace

std::vector<double> project_capped_monotone(const std::vector<double>& point,
                                            const std::vector<double>& budgetWeights,
                                            double budget) {
    if (point.size() != budgetWeights.size()) {
        throw std::invalid_argument("point/budgetWeights size mismatch");
    }
    std::vector<double> x = project_monotone_nonneg(point);
    if (weighted_sum(x, budgetWeights) <= budget) return x;

    // Budget active: bisect the multiplier lambda in
    // x(lambda) = proj_cone(point - lambda * b); the weighted sum is
    // continuous and nonincreasing in lambda.
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        hi = std::max(hi, point[i] / budgetWeights[i] + 1.0);
    }
    std::vector<double> shifted(point.size());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < point.size(); ++i) {
            shifted[i] = point[i] - mid * budgetWeights[i];
        }
        x = project_monotone_nonneg(shifted);
        if (weighted_sum(x, budgetWeights) > budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for (std::size_t i = 0; i < point.size(); ++i) {
        shifted[i] = point[i] - hi * budgetWeights[i];
    }
    return project_monotone_nonneg(shifted);
}

AllocSolution solve_problem8(const AllocInstance& inst, double residualTol,
                             std::size_t maxIters) {
    inst.validate();
    const std::size_t k = inst.size();
    std::vector<double> bw(k);
    for (std::size_t i = 0; i < k; ++i) bw[i] = inst.budgetWeight(i);

    AllocSolution sol;
    sol.gapCertificate = gap_bound(inst);

    const double totalC =
        std::accumulate(inst.coefficients.begin(), inst.coefficients.end(), 0.0);
    if (totalC == 0.0) {
        sol.hatPowers.assign(k, 0.0);
        return sol;
    }

    auto objective = [&](const std::vector<double>& x) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) v += g_tilde(x[i], inst.coefficients[i], inst.scales[i]);
        return v;
    };
    auto gradient = [&](const std::vector<double>& x, std::vector<double>& g) {
        for (std::size_t i = 0; i < k; ++i) {
            g[i] = g_tilde_grad(x[i], inst.coefficients[i], inst.scales[i]);
        }
    };
    auto residual_at = [&](const std::vector<double>& x, const std::vector<double>& g) {
        std::vector<double> trial(k);
        for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] + g[i];
        trial = project_capped_monotone(trial, bw, inst.budget);
        double r = 0.0, scale = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            r = std::max(r, std::abs(trial[i] - x[i]));
            scale = std::max(scale, std::abs(x[i]));
        }
        return r / scale;
    };

    // Interior start with the budget exhausted: phat_k proportional to
    // 1/(r+1)^k, so every budget share is pbar/k.
    std::vector<double> x(k);
    for (std::size_t i = 0; i < k; ++i) x[i] = inst.budget / (static_cast<double>(k) * bw[i]);

    std::vector<double> grad(k), gradNew(k), trial(k);
    gradient(x, grad);
    double fx = objective(x);
    double step = 1.0;
    double residual = residual_at(x, grad);
    std::size_t iter = 0;
    for (; iter < maxIters && residual > residualTol; ++iter) {
        // Backtracking Armijo search along the projection arc.
        double t = step;
        std::vector<double> xNew;
        double fNew = -std::numeric_limits<double>::infinity();
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] + t * grad[i];
            xNew = project_capped_monotone(trial, bw, inst.budget);
            fNew = objective(xNew);
            double inner = 0.0;
            for (std::size_t i = 0; i < k; ++i) inner += grad[i] * (xNew[i] - x[i]);
            if (fNew >= fx + 1e-4 * inner || inner <= 0.0) break;
            t *= 0.5;
        }
        gradient(xNew, gradNew);
        // Barzilai-Borwein step for the next iteration.
        double sy = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double si = xNew[i] - x[i];
            const double yi = gradNew[i] - grad[i];
            sy += si * yi;
            ss += si * si;
        }
        step = (sy < 0.0) ? std::clamp(ss / (-sy), 1e-10, 1e12) : 1e4;
        x.swap(xNew);
        grad.swap(gradNew);
        fx = fNew;
        residual = residual_at(x, grad);
    }
    if (residual > residualTol) {
        throw ConvergenceError(
            "envelope solve did not reach residual " + std::to_string(residualTol) + " within " +
                std::to_string(maxIters) + " iterations (residual = " + std::to_string(residual) +
                ")",
            residual);
    }

    sol.hatPowers = x;
    sol.envelopeValue = fx;
    sol.trueValue = evaluate_true_objective(x, inst);
    sol.optimalityResidual = residual;
    sol.iterations = iter;
    return sol;
}

double evaluate_true_objective(const std::vector<double>& hatPowers, const AllocInstance& inst) {
    if (hatPowers.size() != inst.size()) {
        throw std::invalid_argument("hatPowers size mismatch");
    }
    double value = 0.0;
    double maxInv = 0.0;
    bool dead = false;  // a zero power in the prefix kills all later terms
    for (std::size_t i = 0; i < hatPowers.size(); ++i) {
        if (hatPowers[i] <= 0.0) dead = true;
        if (dead) continue;
        maxInv = std::max(maxInv, 1.0 / hatPowers[i]);
        value += inst.coefficients[i] * std::exp(-inst.scales[i] * maxInv);
    }
    return value;
}

double gap_bound(const AllocInstance& inst) {
    const double sumC =
        std::accumulate(inst.coefficients.begin(), inst.coefficients.end(), 0.0);
    return std::exp(-2.0) * sumC;
}

namespace {

// Shared enumeration core. fixedK < 0 means all K in 1..N.
AllocationResult enumerate_impl(const std::vector<int>& ages, const std::vector<double>& weights,
                                const ChannelParams& channel, int fixedK, int maxClients) {
    channel.validate();
    const int n = static_cast<int>(channel.numClients());
    if (ages.size() != channel.numClients() || weights.size() != channel.numClients()) {
        throw std::invalid_argument("ages/weights must match the client count");
    }
    if (n > maxClients) {
        throw std::invalid_argument("client count " + std::to_string(n) +
                                    " exceeds the enumeration guard (" +
                                    std::to_string(maxClients) +
                                    "); the subset enumeration is exponential in N");
    }
    for (int i = 1; i < n; ++i) {
        if (!(channel.distances[i] < channel.distances[i - 1])) {
            throw std::invalid_argument(
                "multi-client allocation requires strictly decreasing distances");
        }
    }
    if (fixedK >= 0 && (fixedK < 1 || fixedK > n)) {
        throw std::invalid_argument("served count must lie in 1..N");
    }

    AllocationResult best;
    bool haveBest = false;
    const int kLo = fixedK >= 0 ? fixedK : 1;
    const int kHi = fixedK >= 0 ? fixedK : n;
    std::vector<int> subset;
    for (int kk = kLo; kk <= kHi; ++kk) {
        subset.assign(kk, 0);
        // Lexicographic K-subset enumeration over {0..n-1}.
        for (int i = 0; i < kk; ++i) subset[i] = i;
        while (true) {
            AllocInstance inst = AllocInstance::fromChannel(channel, weights, ages, subset);
            AllocSolution sol = solve_problem8(inst);
            const double value = sol.trueValue;
            // Strict improvement only: earlier candidates have smaller K or a
            // lexicographically smaller subset, so ties keep them.
            if (!haveBest || value > best.trueObjective) {
                best.winningSubset = subset;
                best.solution = sol;
                best.trueObjective = value;
                haveBest = true;
            }
            // next subset
            int i = kk - 1;
            while (i >= 0 && subset[i] == n - kk + i) --i;
            if (i < 0) break;
            ++subset[i];
            for (int j = i + 1; j < kk; ++j) subset[j] = subset[j - 1] + 1;
        }
    }

    // Drop zero-power coordinates (trailing under the ordering constraint):
    // they would waste power on an always-outage transmission.
    const double r = channel.rateFactor();
    std::vector<int> served;
    std::vector<double> hat;
    for (std::size_t i = 0; i < best.winningSubset.size(); ++i) {
        if (best.solution.hatPowers[i] > 0.0) {
            served.push_back(best.winningSubset[i]);
            hat.push_back(best.solution.hatPowers[i]);
        }
    }
    best.served = std::move(served);
    best.rawPowers = from_hat_powers(hat, r);
    return best;
}

}  // namespace

AllocationResult enumerate_allocate(const std::vector<int>& ages,
                                    const std::vector<double>& weights,
                                    const ChannelParams& channel, int maxClients) {
    return enumerate_impl(ages, weights, channel, -1, maxClients);
}

AllocationResult enumerate_allocate_fixed_k(const std::vector<int>& ages,
                                            const std::vector<double>& weights,
                                            const ChannelParams& channel, int servedCount,
                                            int maxClients) {
    return enumerate_impl(ages, weights, channel, servedCount, maxClients);
}

BruteForceResult brute_force_problem7(const AllocInstance& inst, double gridStep,
                                      bool enforceOrdering) {
    inst.validate();
    if (!(gridStep > 0.0)) throw std::invalid_argument("gridStep must be > 0");
    const std::size_t k = inst.size();
    if (k > 3) {
        throw std::invalid_argument("brute force limited to K <= 3 (grid is exponential in K)");
    }

    std::vector<double> bw(k);
    for (std::size_t i = 0; i < k; ++i) bw[i] = inst.budgetWeight(i);

    BruteForceResult best;
    best.hatPowers.assign(k, 0.0);
    std::vector<double> x(k, 0.0);

    // The optimum lies on the tight-budget face (scaling any feasible point up
    // to the budget never decreases the objective), so the last coordinate
    // absorbs the leftover budget, capped by the ordering when enforced.
    auto closeLast = [&](double used, double prev) {
        double v = (inst.budget - used) / bw[k - 1];
        if (enforceOrdering && k > 1) v = std::min(v, prev);
        return v;
    };
    auto consider = [&](const std::vector<double>& cand) {
        const double v = evaluate_true_objective(cand, inst);
        if (v > best.value) {
            best.value = v;
            best.hatPowers = cand;
        }
    };

    if (k == 1) {
        x[0] = inst.budget / bw[0];
        consider(x);
    } else if (k == 2) {
        const long n0 = static_cast<long>(inst.budget / (bw[0] * gridStep));
        for (long i = 0; i <= n0; ++i) {
            x[0] = static_cast<double>(i) * gridStep;
            x[1] = closeLast(bw[0] * x[0], x[0]);
            if (x[1] < 0.0) continue;
            consider(x);
        }
    } else {
        const long n0 = static_cast<long>(inst.budget / (bw[0] * gridStep));
        for (long i = 0; i <= n0; ++i) {
            x[0] = static_cast<double>(i) * gridStep;
            const double left = inst.budget - bw[0] * x[0];
            long n1 = static_cast<long>(left / (bw[1] * gridStep));
            if (enforceOrdering) n1 = std::min(n1, i);
            for (long j = 0; j <= n1; ++j) {
                x[1] = static_cast<double>(j) * gridStep;
                x[2] = closeLast(bw[0] * x[0] + bw[1] * x[1], x[1]);
                if (x[2] < 0.0) continue;
                consider(x);
            }
        }
    }
    return best;
}

double grid_error_bound(const AllocInstance& inst, double gridStep) {
    double lipschitz = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        lipschitz += 4.0 * inst.coefficients[i] * std::exp(-2.0) / inst.scales[i];
    }
    return lipschitz * static_cast<double>(inst.size()) * gridStep;
}

}  // namespace aoi
