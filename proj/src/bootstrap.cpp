#include "spdtest/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spdtest/parallel.hpp"

namespace spdtest {

std::pair<MatrixSample, MatrixSample> pooled_resample(const MatrixSample& x,
                                                      const MatrixSample& y,
                                                      RngStream& rng) {
    if (x.empty() || y.empty())
        throw EmptySampleError("pooled_resample: empty sample");
    if (x.dim() != y.dim())
        throw DimensionMismatchError("pooled_resample: sample dimensions disagree");
    const std::size_t n1 = x.size();
    const std::size_t n2 = y.size();
    const std::size_t pool = n1 + n2;
    auto pick = [&](std::size_t idx) -> const SpdMatrix& {
        return idx < n1 ? x[idx] : y[idx - n1];
    };
    MatrixSample a, b;
    for (std::size_t k = 0; k < n1; ++k) a.push_back(pick(rng.uniform_below(pool)));
    for (std::size_t k = 0; k < n2; ++k) b.push_back(pick(rng.uniform_below(pool)));
    return {std::move(a), std::move(b)};
}

double critical_value(const std::vector<double>& stats, double alpha) {
    if (stats.empty()) throw EmptyListError("critical_value: empty list");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw InvalidAlphaError("critical_value: alpha must lie in (0,1), got " +
                                std::to_string(alpha));
    std::vector<double> sorted(stats);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n));
    rank = std::min(std::max<std::size_t>(rank, 1), sorted.size());
    return sorted[rank - 1];
}

WarpSpeedRun warp_speed_power(const ScenarioSpec& spec_x, const ScenarioSpec& spec_y,
                              std::size_t n1, std::size_t n2, const NcwParams& params,
                              std::size_t n_reps, double alpha, std::uint64_t seed,
                              unsigned threads) {
    if (n_reps == 0) throw InvalidRepsError("warp_speed_power: n_reps must be positive");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw InvalidAlphaError("warp_speed_power: alpha must lie in (0,1)");
    validate_scenario(spec_x);
    validate_scenario(spec_y);

    WarpSpeedRun run;
    run.n_reps = n_reps;
    run.alpha = alpha;
    run.observed.assign(n_reps, 0.0);
    run.bootstrap.assign(n_reps, 0.0);

    parallel_for(n_reps, [&](std::size_t j) {
        try {
            RngStream rng(seed, j);
            const MatrixSample x = draw_sample(spec_x, n1, rng);
            const MatrixSample y = draw_sample(spec_y, n2, rng);
            run.observed[j] = statistic_fast(x, y, params).raw;
            const auto [xs, ys] = pooled_resample(x, y, rng);
            run.bootstrap[j] = statistic_fast(xs, ys, params).raw;
        } catch (const PivotFailureError& e) {
            throw PivotFailureError("replication " + std::to_string(j) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("replication " + std::to_string(j) + ": " + e.what());
        }
    }, threads);

    run.c_alpha = critical_value(run.bootstrap, alpha);
    std::size_t rejected = 0;
    for (double v : run.observed)
        if (v > run.c_alpha) ++rejected;
    run.rejection_rate = static_cast<double>(rejected) / static_cast<double>(n_reps);
    return run;
}

PValueResult bootstrap_pvalue(const MatrixSample& x, const MatrixSample& y,
                              const NcwParams& params, std::size_t b_reps,
                              std::uint64_t seed, unsigned threads) {
    if (b_reps == 0) throw InvalidRepsError("bootstrap_pvalue: b_reps must be positive");

    PValueResult res;
    res.b_reps = b_reps;
    res.observed = statistic_fast(x, y, params).raw;
    res.replicates.assign(b_reps, 0.0);

    parallel_for(b_reps, [&](std::size_t b) {
        RngStream rng(seed, b);
        const auto [xs, ys] = pooled_resample(x, y, rng);
        res.replicates[b] = statistic_fast(xs, ys, params).raw;
    }, threads);

    std::size_t count = 0;
    for (double v : res.replicates)
        if (v >= res.observed) ++count;
    res.p_value = static_cast<double>(1 + count) / static_cast<double>(b_reps + 1);
    return res;
}

}  // namespace spdtest
