#include "spdtest/statistic.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "spdtest/accumulate.hpp"

namespace spdtest {

namespace {

void check_inputs(const MatrixSample& x, const MatrixSample& y, const NcwParams& params,
                  const char* who) {
    if (x.empty() || y.empty())
        throw EmptySampleError(std::string(who) + ": empty sample");
    if (x.dim() != y.dim() || x.dim() != params.dim())
        throw DimensionMismatchError(std::string(who) + ": dimensions disagree (X " +
                                     std::to_string(x.dim()) + ", Y " +
                                     std::to_string(y.dim()) + ", params " +
                                     std::to_string(params.dim()) + ")");
}

/// Indices of the sample sorted lexicographically by entries; the canonical
/// order that makes summation permutation-invariant to the last bit.
std::vector<std::size_t> canonical_order(const MatrixSample& s) {
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return compare_entries(s[a].entries(), s[b].entries()) < 0;
    });
    return idx;
}

int compare_sorted_samples(const MatrixSample& a, const std::vector<std::size_t>& oa,
                           const MatrixSample& b, const std::vector<std::size_t>& ob) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k) {
        const int c = compare_entries(a[oa[k]].entries(), b[ob[k]].entries());
        if (c != 0) return c;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

std::vector<LaplaceTransform::Prepared> prepare_all(const LaplaceTransform& lt,
                                                    const MatrixSample& s,
                                                    const std::vector<std::size_t>& order) {
    std::vector<LaplaceTransform::Prepared> out;
    out.reserve(s.size());
    for (std::size_t k : order) out.push_back(lt.prepare(s[k]));
    return out;
}

/// Same-sample block sum_{i,j} L(Ai+Aj), folding the symmetric off-diagonal
/// terms (the doubling is a power-of-two scale, exact in floating point).
double same_block_sum(const LaplaceTransform& lt,
                      const std::vector<LaplaceTransform::Prepared>& p) {
    NeumaierSum acc;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc.add(lt.pair_value(p[i], p[i]));
        for (std::size_t j = i + 1; j < p.size(); ++j)
            acc.add(2.0 * lt.pair_value(p[i], p[j]));
    }
    return acc.value();
}

double cross_block_sum(const LaplaceTransform& lt,
                       const std::vector<LaplaceTransform::Prepared>& pa,
                       const std::vector<LaplaceTransform::Prepared>& pb) {
    NeumaierSum acc;
    for (const auto& a : pa)
        for (const auto& b : pb) acc.add(lt.pair_value(a, b));
    return acc.value();
}

double kernel_eval(const LaplaceTransform& lt, const LaplaceTransform::Prepared& xi,
                   const LaplaceTransform::Prepared& xj,
                   const LaplaceTransform::Prepared& yk,
                   const LaplaceTransform::Prepared& yl) {
    // Group the four cross terms per X element: the grouped sums swap as
    // whole operands of one commutative addition, which keeps the kernel's
    // (Xi,Xj) and (Yk,Yl) symmetries exact in floating point.
    const double same = lt.pair_value(xi, xj) + lt.pair_value(yk, yl);
    const double cross_i = lt.pair_value(xi, yk) + lt.pair_value(xi, yl);
    const double cross_j = lt.pair_value(xj, yk) + lt.pair_value(xj, yl);
    return same - 0.5 * (cross_i + cross_j);
}

StatisticValue make_value(double raw, std::size_t n1, std::size_t n2) {
    StatisticValue v;
    v.raw = raw;
    v.n1 = n1;
    v.n2 = n2;
    v.scaled = scaled_statistic(v);
    return v;
}

}  // namespace

double kernel_psi(const SpdMatrix& xi, const SpdMatrix& xj, const SpdMatrix& yk,
                  const SpdMatrix& yl, const NcwParams& params) {
    const std::size_t d = params.dim();
    if (xi.dim() != d || xj.dim() != d || yk.dim() != d || yl.dim() != d)
        throw DimensionMismatchError("kernel_psi: argument dimension mismatch");
    LaplaceTransform lt(params);
    return kernel_eval(lt, lt.prepare(xi), lt.prepare(xj), lt.prepare(yk), lt.prepare(yl));
}

StatisticValue statistic_reference(const MatrixSample& x, const MatrixSample& y,
                                   const NcwParams& params) {
    check_inputs(x, y, params, "statistic_reference");
    LaplaceTransform lt(params);
    std::vector<LaplaceTransform::Prepared> px, py;
    px.reserve(x.size());
    py.reserve(y.size());
    for (const auto& m : x.items()) px.push_back(lt.prepare(m));
    for (const auto& m : y.items()) py.push_back(lt.prepare(m));

    NeumaierSum acc;
    for (std::size_t i = 0; i < px.size(); ++i)
        for (std::size_t j = 0; j < px.size(); ++j)
            for (std::size_t k = 0; k < py.size(); ++k)
                for (std::size_t l = 0; l < py.size(); ++l)
                    acc.add(kernel_eval(lt, px[i], px[j], py[k], py[l]));

    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    return make_value(acc.value() / (n1 * n1 * n2 * n2), x.size(), y.size());
}

StatisticValue statistic_fast(const MatrixSample& x, const MatrixSample& y,
                              const NcwParams& params) {
    check_inputs(x, y, params, "statistic_fast");

    const auto ox = canonical_order(x);
    const auto oy = canonical_order(y);

    // Canonical role order: the statistic is symmetric in its samples, so
    // computing on (A,B) with a deterministic choice of A makes
    // statistic_fast(X,Y) and statistic_fast(Y,X) bit-identical.
    const MatrixSample* a = &x;
    const MatrixSample* b = &y;
    const std::vector<std::size_t>* oa = &ox;
    const std::vector<std::size_t>* ob = &oy;
    if (compare_sorted_samples(x, ox, y, oy) > 0) {
        std::swap(a, b);
        std::swap(oa, ob);
    }

    LaplaceTransform lt(params);
    const auto pa = prepare_all(lt, *a, *oa);
    const auto pb = prepare_all(lt, *b, *ob);

    const double saa = same_block_sum(lt, pa);
    const double sbb = same_block_sum(lt, pb);
    const double sab = cross_block_sum(lt, pa, pb);

    const double na = static_cast<double>(a->size());
    const double nb = static_cast<double>(b->size());
    const double raw = saa / (na * na) + sbb / (nb * nb) - 2.0 * sab / (na * nb);
    return make_value(raw, x.size(), y.size());
}

double scaled_statistic(const StatisticValue& v) {
    const double n1 = static_cast<double>(v.n1);
    const double n2 = static_cast<double>(v.n2);
    return v.raw * (n1 * n2 / (n1 + n2));
}

}  // namespace spdtest
