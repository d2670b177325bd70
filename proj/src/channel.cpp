#include "aoi/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoi {

namespace {

void require_finite_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
        throw std::invalid_argument(std::string(name) + " must be finite and > 0, got " +
                                    std::to_string(v));
    }
}

}  // namespace

double ChannelParams::rateFactor() const { return std::exp2(targetRate) - 1.0; }

void ChannelParams::validate() const {
    if (distances.empty()) throw std::invalid_argument("at least one client distance required");
    for (double d : distances) require_finite_positive(d, "distance");
    require_finite_positive(pathLossExp, "pathLossExp");
    require_finite_positive(noisePower, "noisePower");
    require_finite_positive(powerBudget, "powerBudget");
    require_finite_positive(targetRate, "targetRate");
}

ChannelParams ChannelParams::fromSnr(std::vector<double> distances, double pathLossExp,
                                     double targetRate, double snrLinear) {
    require_finite_positive(snrLinear, "snr");
    ChannelParams p;
    p.distances = std::move(distances);
    p.pathLossExp = pathLossExp;
    p.noisePower = 1.0;
    p.powerBudget = snrLinear;
    p.targetRate = targetRate;
    p.validate();
    return p;
}

double snr_from_db(double snrDb) { return std::pow(10.0, snrDb / 10.0); }

double oma_outage(double d, const ChannelParams& params) {
    return oma_outage_at_power(d, params.powerBudget, params);
}

double oma_outage_at_power(double d, double power, const ChannelParams& params) {
    require_finite_positive(d, "distance");
    require_finite_positive(power, "power");
    params.validate();
    const double rho = power / params.noisePower;
    return -std::expm1(-params.rateFactor() * std::pow(d, params.pathLossExp) / rho);
}

namespace {

// Shared validation for the two-user NOMA formulas: alpha2 must lie strictly
// inside (r/(1+r), 1) so that alpha2 - alpha1 r > 0 and alpha1 > 0.
void check_alpha2(double alpha2, double r) {
    const double lower = r / (1.0 + r);
    if (!std::isfinite(alpha2) || alpha2 <= lower || alpha2 >= 1.0) {
        throw std::domain_error("alpha2 = " + std::to_string(alpha2) +
                                " outside the valid NOMA range (" + std::to_string(lower) +
                                ", 1)");
    }
}

}  // namespace

double noma2_outage_far(double alpha2, double d2, const ChannelParams& params) {
    require_finite_positive(d2, "distance");
    params.validate();
    const double r = params.rateFactor();
    check_alpha2(alpha2, r);
    const double alpha1 = 1.0 - alpha2;
    const double rho = params.snr();
    return -std::expm1(-r * std::pow(d2, params.pathLossExp) / (rho * (alpha2 - alpha1 * r)));
}

double noma2_outage_near(double alpha2, double d1, const ChannelParams& params) {
    require_finite_positive(d1, "distance");
    params.validate();
    const double r = params.rateFactor();
    check_alpha2(alpha2, r);
    const double alpha1 = 1.0 - alpha2;
    const double rho = params.snr();
    const double dTau = std::pow(d1, params.pathLossExp);
    const double sicTerm = r * dTau / (rho * (alpha2 - alpha1 * r));
    const double ownTerm = r * dTau / (rho * alpha1);
    return -std::expm1(-std::max(sicTerm, ownTerm));
}

bool always_outage(const PowerAllocation& alloc, std::size_t k) {
    if (k == 0 || k > alloc.numServed()) throw std::invalid_argument("decoding index out of range");
    for (std::size_t t = 0; t < k; ++t) {
        if (alloc.hatPowers[t] <= 0.0) return true;
    }
    return false;
}

double noma_k_outage(const PowerAllocation& alloc, std::size_t k, const ChannelParams& params) {
    params.validate();
    if (k == 0 || k > alloc.numServed()) throw std::invalid_argument("decoding index out of range");
    if (always_outage(alloc, k)) return 1.0;
    double maxInv = 0.0;
    for (std::size_t t = 0; t < k; ++t) maxInv = std::max(maxInv, 1.0 / alloc.hatPowers[t]);
    const int client = alloc.servedSet[k - 1];
    if (client < 0 || static_cast<std::size_t>(client) >= params.numClients()) {
        throw std::invalid_argument("served client index out of range");
    }
    const double dTau = std::pow(params.distances[client], params.pathLossExp);
    return -std::expm1(-dTau * params.rateFactor() * params.noisePower * maxInv);
}

std::vector<double> to_hat_powers(const std::vector<double>& rawPowers, double rateFactor) {
    const std::size_t n = rawPowers.size();
    std::vector<double> hat(n);
    double tail = 0.0;  // sum of raw powers with larger decoding index
    for (std::size_t k = n; k-- > 0;) {
        hat[k] = rawPowers[k] - rateFactor * tail;
        tail += rawPowers[k];
    }
    return hat;
}

std::vector<double> from_hat_powers(const std::vector<double>& hatPowers, double rateFactor) {
    const std::size_t n = hatPowers.size();
    std::vector<double> raw(n);
    double tail = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        raw[k] = hatPowers[k] + rateFactor * tail;
        tail += raw[k];
    }
    return raw;
}

PowerAllocation PowerAllocation::fromRaw(std::vector<int> servedSet,
                                         std::vector<double> rawPowers, double rateFactor) {
    if (servedSet.size() != rawPowers.size()) {
        throw std::invalid_argument("servedSet and rawPowers must have equal length");
    }
    for (std::size_t i = 1; i < servedSet.size(); ++i) {
        if (servedSet[i] <= servedSet[i - 1]) {
            throw std::invalid_argument("servedSet must be strictly increasing");
        }
    }
    PowerAllocation alloc;
    alloc.servedSet = std::move(servedSet);
    alloc.hatPowers = to_hat_powers(rawPowers, rateFactor);
    alloc.rawPowers = std::move(rawPowers);
    return alloc;
}

PowerAllocation PowerAllocation::fromHat(std::vector<int> servedSet,
                                         std::vector<double> hatPowers, double rateFactor) {
    if (servedSet.size() != hatPowers.size()) {
        throw std::invalid_argument("servedSet and hatPowers must have equal length");
    }
    for (std::size_t i = 1; i < servedSet.size(); ++i) {
        if (servedSet[i] <= servedSet[i - 1]) {
            throw std::invalid_argument("servedSet must be strictly increasing");
        }
    }
    PowerAllocation alloc;
    alloc.servedSet = std::move(servedSet);
    alloc.rawPowers = from_hat_powers(hatPowers, rateFactor);
    alloc.hatPowers = std::move(hatPowers);
    return alloc;
}

}  // namespace aoi
