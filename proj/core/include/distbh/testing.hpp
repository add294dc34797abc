#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace distbh {

/// One node's p-values with ground-truth labels; is_null[k] != 0 means
/// p-value k was generated under the null hypothesis.
struct PValueBatch {
    std::vector<double> pvalues;
    std::vector<std::uint8_t> is_null;

    std::size_t size() const { return pvalues.size(); }
    std::size_t null_count() const;
    std::size_t alt_count() const { return size() - null_count(); }

    /// Throws InputError on length mismatch or a p-value outside [0,1].
    void validate() const;
};

/// Outcome of one BH run.
struct BhResult {
    std::size_t k_hat = 0;                 // number of rejections
    double threshold = 0.0;                // alpha * k_hat / m, 0 when k_hat = 0
    std::vector<std::uint32_t> rejected;   // original indices, ascending
};

/// Realized per-trial error/power numbers.
struct TrialMetrics {
    std::size_t rejections = 0;        // R
    std::size_t false_rejections = 0;  // V
    double fdp = 0.0;                  // V / max(R,1)
    double tdp = 0.0;                  // (R-V) / max(m1,1)
};

/// Step-up BH at level alpha: rejects the k_hat smallest p-values where
/// k_hat = max{0 <= k <= m : p_(k) <= alpha*k/m} (p_(0) = 0). The rejected
/// set is exactly {k : p_k <= threshold}, so ties at the cut are all in.
BhResult bh_procedure(std::span<const double> pvalues, double alpha);

/// Bonferroni (FWER) correction: indices with p_k <= alpha/m.
std::vector<std::uint32_t> bonferroni(std::span<const double> pvalues, double alpha);

/// V, R, FDP and TDP of `result` against the batch's ground truth.
TrialMetrics trial_metrics(const PValueBatch& batch, const BhResult& result);

/// Means of fdp/tdp over trials: (fdr_hat, power_hat).
std::pair<double, double> aggregate_metrics(std::span<const TrialMetrics> trials);

/// Largest k with sorted[k-1] <= alpha*k/m over an ascending array.
/// Building block for bh_procedure and for callers that reuse one sorted
/// copy across several alpha values.
std::size_t bh_count_sorted(std::span<const double> sorted, double alpha);

}  // namespace distbh
