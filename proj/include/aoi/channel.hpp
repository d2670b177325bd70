#pragma once

// Closed-form Rayleigh outage models for OMA, two-user NOMA and K-user SIC
// NOMA downlinks, plus the power-variable transform that turns the SIC
// decodability conditions into positivity constraints.
//
// All functions are pure and operate on immutable parameter records; they are
// safe to call concurrently. Everything is in linear scale (dB conversion is
// a front-end concern).

#include <cstddef>
#include <vector>

namespace aoi {

/// Physical downlink setup shared by every model in the toolkit.
///
/// Distances are normalized (d_i = c_i / c_0) and their ordering convention
/// is owned by the caller: the two-client machinery reads index 0 as the near
/// client, the K-user machinery requires strictly decreasing distances
/// (decoding order runs from far to near).
struct ChannelParams {
    std::vector<double> distances;  ///< normalized distances d_i, one per client
    double pathLossExp = 2.0;       ///< path loss exponent tau
    double noisePower = 1.0;        ///< sigma^2, normalized watts
    double powerBudget = 1.0;       ///< total transmit power pbar, normalized watts

    double targetRate = 1.0;        ///< target rate R, bits/s/Hz (common to all clients)

    /// Transmission SNR rho = pbar / sigma^2 (linear).
    double snr() const { return powerBudget / noisePower; }
    /// Rate factor r = 2^R - 1.
    double rateFactor() const;

    std::size_t numClients() const { return distances.size(); }

    /// Throws std::invalid_argument unless every field is finite and positive.
    void validate() const;

    /// Convenience: params with rho given directly (sigma^2 = 1, pbar = rho).
    static ChannelParams fromSnr(std::vector<double> distances, double pathLossExp,
                                 double targetRate, double snrLinear);
};

/// Linear-scale SNR from a dB figure.
double snr_from_db(double snrDb);

/// Power allocation over an ordered served set {m(1) < m(2) < ... < m(K)}.
/// Decoding order k runs over the served set in increasing client index
/// (far-to-near under the K-user distance convention). rawPowers and
/// hatPowers are aligned with servedSet.
struct PowerAllocation {
    std::vector<int> servedSet;      ///< client indices, strictly increasing
    std::vector<double> rawPowers;   ///< p_{m(k)}, watts
    std::vector<double> hatPowers;   ///< phat_{m(k)} = p_{m(k)} - r * sum_{i>k} p_{m(i)}

    std::size_t numServed() const { return servedSet.size(); }

    /// Builds the allocation from raw powers (hat powers derived).
    static PowerAllocation fromRaw(std::vector<int> servedSet,
                                   std::vector<double> rawPowers, double rateFactor);
    /// Builds the allocation from hat powers (raw powers derived).
    static PowerAllocation fromHat(std::vector<int> servedSet,
                                   std::vector<double> hatPowers, double rateFactor);
};

/// OMA outage probability at a client at distance d served with the full
/// budget: 1 - exp(-(2^R - 1) d^tau / rho). Strictly increasing in d,
/// strictly decreasing in rho. Throws std::invalid_argument on non-finite or
/// non-positive d.
double oma_outage(double d, const ChannelParams& params);

/// Same model with an explicit transmit power p (rho replaced by p/sigma^2).
double oma_outage_at_power(double d, double power, const ChannelParams& params);

/// Two-user NOMA, far client (decodes directly, near-client signal is
/// interference): 1 - exp(-r d2^tau / (rho (alpha2 - alpha1 r))) with
/// alpha1 = 1 - alpha2. Requires r/(1+r) < alpha2 < 1; throws
/// std::domain_error outside that range.
double noma2_outage_far(double alpha2, double d2, const ChannelParams& params);

/// Two-user NOMA, near client (SIC: decodes the far message first, then its
/// own): 1 - exp(-max{ r d1^tau / (rho (alpha2 - alpha1 r)),
///                     r d1^tau / (rho alpha1) }).
/// Unimodal in alpha2 with the minimum at alpha2 = 2^R / (2^R + 1).
double noma2_outage_near(double alpha2, double d1, const ChannelParams& params);

/// K-user SIC NOMA outage of the k-th served client (1-based decoding index):
/// 1 - exp(-d_{m(k)}^tau r sigma^2 max_{t<=k} 1/phat_{m(t)}).
/// A non-positive hat power anywhere in the decoding prefix means the SIC
/// condition is violated and the outage is exactly 1.
double noma_k_outage(const PowerAllocation& alloc, std::size_t k,
                     const ChannelParams& params);

/// True when some hat power in the decoding prefix 1..k is non-positive,
/// i.e. noma_k_outage(alloc, k, .) == 1 regardless of the channel.
bool always_outage(const PowerAllocation& alloc, std::size_t k);

/// phat_{m(k)} = p_{m(k)} - r sum_{i>k} p_{m(i)}. May produce non-positive
/// entries; those mark infeasible (always-outage) allocations.
std::vector<double> to_hat_powers(const std::vector<double>& rawPowers, double rateFactor);

/// Inverse transform by back-substitution:
/// p_{m(K)} = phat_{m(K)}, p_{m(k)} = phat_{m(k)} + r sum_{i>k} p_{m(i)}.
std::vector<double> from_hat_powers(const std::vector<double>& hatPowers, double rateFactor);

}  // namespace aoi
