#include "distbh/testing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distbh/errors.hpp"

namespace distbh {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw InputError("alpha must be in (0,1]");
}

void check_pvalues(std::span<const double> pvalues) {
    for (double p : pvalues)
        if (!(p >= 0.0) || p > 1.0)
            throw InputError("p-value outside [0,1]");
}

}  // namespace

std::size_t PValueBatch::null_count() const {
    return static_cast<std::size_t>(
        std::count_if(is_null.begin(), is_null.end(), [](std::uint8_t b) { return b != 0; }));
}

void PValueBatch::validate() const {
    if (pvalues.size() != is_null.size())
        throw InputError("pvalues and is_null lengths differ");
    check_pvalues(pvalues);
}

std::size_t bh_count_sorted(std::span<const double> sorted, double alpha) {
    const std::size_t m = sorted.size();
    const double dm = static_cast<double>(m);
    // alpha*k/m is evaluated exactly as written so the acceptance bound at
    // k = k_hat is bit-identical to the reported threshold.
    for (std::size_t k = m; k >= 1; --k) {
        if (sorted[k - 1] <= alpha * static_cast<double>(k) / dm) return k;
    }
    return 0;
}

BhResult bh_procedure(std::span<const double> pvalues, double alpha) {
    check_alpha(alpha);
    check_pvalues(pvalues);

    BhResult out;
    const std::size_t m = pvalues.size();
    if (m == 0) return out;

    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::sort(sorted.begin(), sorted.end());

    out.k_hat = bh_count_sorted(sorted, alpha);
    if (out.k_hat == 0) return out;

    out.threshold = alpha * static_cast<double>(out.k_hat) / static_cast<double>(m);
    out.rejected.reserve(out.k_hat);
    for (std::size_t i = 0; i < m; ++i)
        if (pvalues[i] <= out.threshold) out.rejected.push_back(static_cast<std::uint32_t>(i));
    // |{p <= threshold}| = k_hat: one more would contradict maximality of k_hat.
    return out;
}

std::vector<std::uint32_t> bonferroni(std::span<const double> pvalues, double alpha) {
    check_alpha(alpha);
    check_pvalues(pvalues);

    std::vector<std::uint32_t> rejected;
    const std::size_t m = pvalues.size();
    if (m == 0) return rejected;

    const double cut = alpha / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i)
        if (pvalues[i] <= cut) rejected.push_back(static_cast<std::uint32_t>(i));
    return rejected;
}

TrialMetrics trial_metrics(const PValueBatch& batch, const BhResult& result) {
    TrialMetrics tm;
    tm.rejections = result.rejected.size();
    for (std::uint32_t idx : result.rejected) {
        if (idx >= batch.size())
            throw ConsistencyError("rejected index out of range for batch");
        if (batch.is_null[idx]) ++tm.false_rejections;
    }
    const std::size_t m1 = batch.alt_count();
    tm.fdp = static_cast<double>(tm.false_rejections) /
             static_cast<double>(std::max<std::size_t>(tm.rejections, 1));
    tm.tdp = static_cast<double>(tm.rejections - tm.false_rejections) /
             static_cast<double>(std::max<std::size_t>(m1, 1));
    return tm;
}

std::pair<double, double> aggregate_metrics(std::span<const TrialMetrics> trials) {
    if (trials.empty()) throw InputError("aggregate_metrics: no trials");
    double fdr = 0.0, power = 0.0;
    for (const auto& t : trials) {
        fdr += t.fdp;
        power += t.tdp;
    }
    const double n = static_cast<double>(trials.size());
    return {fdr / n, power / n};
}

}  // namespace distbh
