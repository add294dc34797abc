#include "distbh/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "distbh/errors.hpp"

namespace distbh {

void AlternativeModel::validate() const {
    if (!(half_width >= 0.0) || !(mu_base > half_width))
        throw InputError("AlternativeModel: need mu_base > half_width >= 0");
}

double AlternativeModel::draw_mu(RngStream& stream) const {
    const double u = stream.uniform01();
    if (!symmetric)
        return mu_base - half_width + 2.0 * half_width * u;
    // u < 1/2 selects the negative interval; reuse the residual as position.
    if (u < 0.5)
        return -mu_base - half_width + 2.0 * half_width * (2.0 * u);
    return mu_base - half_width + 2.0 * half_width * (2.0 * (u - 0.5));
}

void NodeGenSpec::validate() const {
    if (m1 > m) throw InputError("NodeGenSpec: m1 exceeds m");
    alt.validate();
    if (const auto* ar = std::get_if<Ar1>(&dependence)) {
        if (!(ar->rho >= 0.0) || !(ar->rho < 1.0))
            throw InputError("NodeGenSpec: ar1 rho outside [0,1)");
    } else if (const auto* bl = std::get_if<EquiBlock>(&dependence)) {
        if (!(bl->rho >= 0.0) || !(bl->rho < 1.0))
            throw InputError("NodeGenSpec: block rho outside [0,1)");
        if (bl->block_size < 1) throw InputError("NodeGenSpec: block_size must be >= 1");
    }
}

std::vector<double> gen_ar1(std::size_t m, double rho, RngStream& stream) {
    if (!(rho >= 0.0) || !(rho < 1.0)) throw InputError("gen_ar1: rho outside [0,1)");
    std::vector<double> x(m);
    if (m == 0) return x;
    const double noise = std::sqrt(1.0 - rho * rho);
    x[0] = stream.normal();
    for (std::size_t k = 1; k < m; ++k) x[k] = rho * x[k - 1] + noise * stream.normal();
    return x;
}

std::vector<double> gen_block(std::size_t m, double rho, std::size_t block_size,
                              RngStream& stream) {
    if (!(rho >= 0.0) || !(rho < 1.0)) throw InputError("gen_block: rho outside [0,1)");
    if (block_size < 1) throw InputError("gen_block: block_size must be >= 1");
    std::vector<double> x(m);
    if (rho == 0.0) {
        for (auto& v : x) v = stream.normal();
        return x;
    }
    const double shared = std::sqrt(rho);
    const double own = std::sqrt(1.0 - rho);
    for (std::size_t start = 0; start < m; start += block_size) {
        const double w = stream.normal();
        const std::size_t end = std::min(start + block_size, m);
        for (std::size_t k = start; k < end; ++k) x[k] = shared * w + own * stream.normal();
    }
    return x;
}

namespace {

std::vector<double> gen_statistics(const NodeGenSpec& spec, RngStream& stream) {
    const auto m = static_cast<std::size_t>(spec.m);
    if (std::holds_alternative<Independent>(spec.dependence)) {
        std::vector<double> x(m);
        for (auto& v : x) v = stream.normal();
        return x;
    }
    if (const auto* ar = std::get_if<Ar1>(&spec.dependence))
        return gen_ar1(m, ar->rho, stream);
    const auto& bl = std::get<EquiBlock>(spec.dependence);
    return gen_block(m, bl.rho, bl.block_size, stream);
}

// First m1 entries of a uniformly random permutation of 0..m-1
// (partial Fisher-Yates).
std::vector<std::uint32_t> sample_positions(std::size_t m, std::size_t m1,
                                            RngStream& stream) {
    std::vector<std::uint32_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::size_t j = 0; j < m1; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(stream.below(m - j));
        std::swap(idx[j], idx[pick]);
    }
    idx.resize(m1);
    return idx;
}

}  // namespace

PValueBatch gen_node_batch(const NodeGenSpec& spec, RngStream& stream) {
    spec.validate();
    const auto m = static_cast<std::size_t>(spec.m);
    const auto m1 = static_cast<std::size_t>(spec.m1);

    // Correlated unit-variance noise first, then the alternative means on
    // top, so marginals are N(0,1) under H0 and N(mu,1) under H1 while the
    // covariance structure stays as constructed.
    std::vector<double> x = gen_statistics(spec, stream);

    PValueBatch batch;
    batch.is_null.assign(m, 1);
    if (m1 > 0) {
        for (std::uint32_t pos : sample_positions(m, m1, stream)) {
            x[pos] += spec.alt.draw_mu(stream);
            batch.is_null[pos] = 0;
        }
    }

    batch.pvalues.resize(m);
    for (std::size_t k = 0; k < m; ++k) batch.pvalues[k] = two_sided_pvalue(x[k]);
    return batch;
}

PValueBatch gen_mixture_batch(std::size_t m, double r0, const AlternativeModel& alt,
                              RngStream& stream) {
    if (!(r0 >= 0.0) || !(r0 <= 1.0)) throw InputError("gen_mixture_batch: r0 outside [0,1]");
    alt.validate();
    PValueBatch batch;
    batch.pvalues.resize(m);
    batch.is_null.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const bool null_draw = stream.uniform01() < r0;
        const double x = null_draw ? stream.normal() : stream.normal() + alt.draw_mu(stream);
        batch.pvalues[k] = two_sided_pvalue(x);
        batch.is_null[k] = null_draw ? 1 : 0;
    }
    return batch;
}

std::vector<std::uint64_t> node_sizes(double n, std::uint32_t num_nodes, SizeRule rule) {
    if (!(n >= 1.0)) throw InputError("node_sizes: n must be >= 1");
    std::vector<std::uint64_t> sizes(num_nodes);
    for (std::uint32_t i = 1; i <= num_nodes; ++i) {
        switch (rule) {
            case SizeRule::uniform:
                sizes[i - 1] = static_cast<std::uint64_t>(std::llround(n));
                break;
            case SizeRule::power: {
                const double expo =
                    0.2 + 0.8 * static_cast<double>(i) / static_cast<double>(num_nodes);
                sizes[i - 1] = static_cast<std::uint64_t>(std::llround(std::pow(n, expo)));
                break;
            }
        }
    }
    return sizes;
}

}  // namespace distbh
