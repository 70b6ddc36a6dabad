// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_CSAMPLER_HPP
#define CLHGIBBS_CSAMPLER_HPP

#include <string>
#include <vector>

#include "clhgibbs/classical.hpp"
#include "clhgibbs/core.hpp"

namespace clhgibbs {

// probs indexed by config_index over `dims`.
struct GibbsDistribution {
  std::vector<int> dims;
  std::vector<double> probs;
  double log_partition = 0.0;

  double prob(const SpinConfig& x) const { return probs[config_index(x, dims)]; }
};

// Refuses state spaces above 2^20 configurations.
GibbsDistribution exact_distribution(const ClassicalHamiltonian& h, double beta);

struct ChainState {
  SpinConfig config;
  long long step_count = 0;
  Rng rng;
  double energy = 0.0;  // kept equal to h.energy(config)
};

// Uniformly random initial configuration drawn from `seed`.
ChainState make_chain(const ClassicalHamiltonian& h, uint64_t seed);

// One Metropolis single-site update; returns whether the proposal changed
// the configuration. `site`, when given, receives the proposed site.
bool glauber_step(ChainState& state, const ClassicalHamiltonian& h, double beta, int* site = nullptr);

// Energy in the form offset - sum J_uv s_u s_v - sum h_u s_u with s = +1 for
// value 0 and s = -1 for value 1.
struct IsingForm {
  struct Edge {
    int u, v;
    double J;
  };
  int n = 0;
  std::vector<Edge> edges;
  std::vector<double> fields;
  double offset = 0.0;
};

// Ising form of a binary-site Hamiltonian with couplings of either sign.
// Rejects non-binary sites. Edges with |J| below 1e-14 are dropped.
IsingForm extract_ising(const ClassicalHamiltonian& h);
// As above; additionally rejects J < 0 (antiferromagnetic edges).
IsingForm extract_ferro_ising(const ClassicalHamiltonian& h);

void swendsen_wang_step(ChainState& state, const ClassicalHamiltonian& h, const IsingForm& form, double beta);

enum class SamplerKind { glauber, swendsen_wang, exact };
std::string sampler_name(SamplerKind k);
SamplerKind sampler_from_name(const std::string& s);

struct SampleOptions {
  SamplerKind kind = SamplerKind::glauber;
  long long burn_in = -1;   // sweeps (SW steps); -1 means 100 * n
  long long n_samples = 1000;
  long long thinning = -1;  // single-site updates (SW steps); -1 means n (1)
  uint64_t seed = 0;
};

std::vector<SpinConfig> sample(const ClassicalHamiltonian& h, double beta, const SampleOptions& options);

// `chains` independent runs, chain c seeded with seed + c, each producing
// its share of n_samples; output concatenated in chain order. One chain
// uses `options` unchanged.
std::vector<SpinConfig> sample_chains(const ClassicalHamiltonian& h, double beta, const SampleOptions& options,
                                      int chains, int threads = 1);

std::vector<double> empirical_distribution(const std::vector<SpinConfig>& samples, const std::vector<int>& dims);

// 1/2 sum |p_hat - p|.
double tv_distance(const std::vector<double>& empirical, const GibbsDistribution& exact);
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

// One application of the exact Glauber transition kernel to `p`.
std::vector<double> glauber_kernel_apply(const ClassicalHamiltonian& h, double beta, const std::vector<double>& p);

}  // namespace clhgibbs

#endif  // CLHGIBBS_CSAMPLER_HPP
