#ifndef SPDTEST_BOOTSTRAP_HPP
#define SPDTEST_BOOTSTRAP_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "spdtest/samplers.hpp"
#include "spdtest/statistic.hpp"

namespace spdtest {

/// Result of the warp-speed power run: N observed statistics, N pooled
/// bootstrap statistics (exactly one per replication — that is the whole
/// trick), the empirical critical value and the rejection rate.
struct WarpSpeedRun {
    std::size_t n_reps = 0;
    double alpha = 0.0;
    std::vector<double> observed;
    std::vector<double> bootstrap;
    double c_alpha = 0.0;
    double rejection_rate = 0.0;
};

struct PValueResult {
    double observed = 0.0;       // raw statistic of the data
    std::size_t b_reps = 0;
    double p_value = 1.0;        // (1 + #{L*_b >= observed}) / (B + 1)
    std::vector<double> replicates;
};

/// One pooled bootstrap resample: n1 then n2 draws with replacement from
/// the concatenation of the two samples.
std::pair<MatrixSample, MatrixSample> pooled_resample(const MatrixSample& x,
                                                      const MatrixSample& y,
                                                      RngStream& rng);

/// Order statistic at rank ceil((1-alpha)*N) of the ascending-sorted list.
double critical_value(const std::vector<double>& stats, double alpha);

/// Warp-speed bootstrap power estimate: per replication j (stream id j)
/// draw fresh samples from the two scenarios, compute the statistic, take
/// one pooled resample and compute its statistic; reject replication j
/// when its observed statistic exceeds the (1-alpha) empirical quantile of
/// the bootstrap statistics. Replications run in parallel; any failure
/// aborts the run with the replication index attached.
WarpSpeedRun warp_speed_power(const ScenarioSpec& spec_x, const ScenarioSpec& spec_y,
                              std::size_t n1, std::size_t n2, const NcwParams& params,
                              std::size_t n_reps, double alpha, std::uint64_t seed,
                              unsigned threads = 0);

/// Standard pooled nonparametric bootstrap p-value for two observed
/// samples, with the (1 + count)/(B + 1) estimator.
PValueResult bootstrap_pvalue(const MatrixSample& x, const MatrixSample& y,
                              const NcwParams& params, std::size_t b_reps,
                              std::uint64_t seed, unsigned threads = 0);

}  // namespace spdtest

#endif  // SPDTEST_BOOTSTRAP_HPP
