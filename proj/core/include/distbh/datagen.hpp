#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "distbh/rng.hpp"
#include "distbh/testing.hpp"

namespace distbh {

/// Distribution of the alternative mean: mu ~ Unif on
/// [mu_base - half_width, mu_base + half_width], mirrored onto the negative
/// axis with probability 1/2 when symmetric. half_width = 0 degenerates to a
/// point mass. The interval must stay away from zero (mu_base > half_width).
struct AlternativeModel {
    double mu_base = 3.0;
    double half_width = 0.5;
    bool symmetric = true;

    void validate() const;
    double draw_mu(RngStream& stream) const;  // consumes exactly one uniform
};

struct Independent {};
struct Ar1 {
    double rho = 0.0;  // in [0,1); cov(x_i, x_j) = rho^|i-j|
};
struct EquiBlock {
    double rho = 0.0;              // in [0,1); cov within a block
    std::size_t block_size = 20;
};
using Dependence = std::variant<Independent, Ar1, EquiBlock>;

/// What one node generates for one trial.
struct NodeGenSpec {
    std::uint64_t m = 0;   // total p-values
    std::uint64_t m1 = 0;  // alternatives among them
    AlternativeModel alt;
    Dependence dependence = Independent{};

    void validate() const;
};

/// AR(1) standard-normal vector: x_1 = z_1, x_k = rho x_{k-1} + sqrt(1-rho^2) z_k.
/// rho = 0 consumes the stream identically to independent draws.
std::vector<double> gen_ar1(std::size_t m, double rho, RngStream& stream);

/// Block-equicorrelated standard-normal vector: within each consecutive block,
/// x_k = sqrt(rho) w_b + sqrt(1-rho) z_k with one shared w_b per block.
/// rho = 0 degenerates to independent draws (no w_b consumed).
std::vector<double> gen_block(std::size_t m, double rho, std::size_t block_size,
                              RngStream& stream);

/// One node's labeled batch: correlated N(0,1) noise, per-alternative means
/// added at uniformly shuffled positions, then two-sided p-values
/// p = 2(1 - Phi(|x|)).
PValueBatch gen_node_batch(const NodeGenSpec& spec, RngStream& stream);

/// i.i.d. labeled draws from the mixture G(t; r0) = r0 U(t) + (1-r0) F(t):
/// each entry is null with probability r0 (Bernoulli labels, not fixed
/// counts). Used by the asymptotic-convergence checks.
PValueBatch gen_mixture_batch(std::size_t m, double r0, const AlternativeModel& alt,
                              RngStream& stream);

enum class SizeRule {
    uniform,  // m_i = n
    power,    // m_i = round(n^(0.2 + 0.8 i/N)), i = 1..N
};

std::vector<std::uint64_t> node_sizes(double n, std::uint32_t num_nodes, SizeRule rule);

}  // namespace distbh
