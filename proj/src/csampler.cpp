// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/csampler.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace clhgibbs {

namespace {

constexpr long long kMaxExactConfigs = 1LL << 20;

// Metropolis acceptance min{1, exp(-beta dE)} evaluated without overflow.
double acceptance(double beta, double dE) {
  const double x = -beta * dE;
  return x >= 0.0 ? 1.0 : std::exp(x);
}

int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) {
    parent[a] = parent[parent[a]];
    a = parent[a];
  }
  return a;
}

}  // namespace

GibbsDistribution exact_distribution(const ClassicalHamiltonian& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and nonnegative");
  const long long n = h.num_configs();
  if (n > kMaxExactConfigs) throw OutOfScopeError("exact enumeration refuses more than 2^20 configurations");
  GibbsDistribution d;
  d.dims = h.dims();
  std::vector<double> logw(n);
  SpinConfig x(h.num_sites(), 0);
  for (long long i = 0; i < n; ++i) {
    logw[i] = -beta * h.energy(x);
    for (int s = h.num_sites() - 1; s >= 0; --s) {
      if (++x[s] < d.dims[s]) break;
      x[s] = 0;
    }
  }
  d.log_partition = log_sum_exp(logw);
  d.probs.resize(n);
  for (long long i = 0; i < n; ++i) d.probs[i] = std::exp(logw[i] - d.log_partition);
  return d;
}

ChainState make_chain(const ClassicalHamiltonian& h, uint64_t seed) {
  ChainState st;
  st.rng = Rng(seed);
  st.config.resize(h.num_sites());
  for (int s = 0; s < h.num_sites(); ++s) st.config[s] = static_cast<int>(st.rng.below(h.dims()[s]));
  st.energy = h.energy(st.config);
  return st;
}

bool glauber_step(ChainState& state, const ClassicalHamiltonian& h, double beta, int* site_out) {
  ++state.step_count;
  if (h.num_sites() == 0) return false;
  const int site = static_cast<int>(state.rng.below(h.num_sites()));
  if (site_out) *site_out = site;
  const int value = static_cast<int>(state.rng.below(h.dims()[site]));
  const double dE = h.delta_energy(state.config, site, value);
  const double a = acceptance(beta, dE);
  if (a < 1.0 && !state.rng.bernoulli(a)) return false;
  if (value == state.config[site]) return false;
  state.config[site] = value;
  state.energy += dE;
  return true;
}

IsingForm extract_ising(const ClassicalHamiltonian& h) {
  IsingForm f;
  f.n = h.num_sites();
  f.fields.assign(f.n, 0.0);
  for (int s = 0; s < f.n; ++s)
    if (h.dims()[s] != 2)
      throw ValidationError("Swendsen-Wang needs binary sites; site " + std::to_string(h.ids()[s]) + " has dimension " +
                            std::to_string(h.dims()[s]));
  std::map<std::pair<int, int>, double> couplings;
  for (const ClassicalTerm& t : h.terms()) {
    const std::vector<double>& e = t.table;
    if (t.support.size() == 1) {
      // E = (e0 + e1)/2 + (e0 - e1)/2 * s
      f.offset += 0.5 * (e[0] + e[1]);
      f.fields[t.support[0]] -= 0.5 * (e[0] - e[1]);
    } else {
      const int a = t.support[0];
      const int b = t.support[1];
      f.offset += 0.25 * (e[0] + e[1] + e[2] + e[3]);
      f.fields[a] -= 0.25 * (e[0] + e[1] - e[2] - e[3]);
      f.fields[b] -= 0.25 * (e[0] - e[1] + e[2] - e[3]);
      couplings[{std::min(a, b), std::max(a, b)}] -= 0.25 * (e[0] - e[1] - e[2] + e[3]);
    }
  }
  for (const auto& [key, J] : couplings)
    if (std::abs(J) >= 1e-14) f.edges.push_back({key.first, key.second, J});
  return f;
}

IsingForm extract_ferro_ising(const ClassicalHamiltonian& h) {
  IsingForm f = extract_ising(h);
  for (const IsingForm::Edge& e : f.edges)
    if (e.J < 0.0)
      throw ValidationError("Swendsen-Wang needs ferromagnetic couplings; edge (" + std::to_string(h.ids()[e.u]) + "," +
                            std::to_string(h.ids()[e.v]) + ") has J = " + fmt17(e.J));
  return f;
}

void swendsen_wang_step(ChainState& state, const ClassicalHamiltonian& h, const IsingForm& form, double beta) {
  ++state.step_count;
  std::vector<int> parent(form.n);
  std::iota(parent.begin(), parent.end(), 0);
  for (const IsingForm::Edge& e : form.edges) {
    if (state.config[e.u] != state.config[e.v]) continue;
    const double p_open = -std::expm1(-2.0 * beta * e.J);
    if (state.rng.bernoulli(p_open)) parent[find_root(parent, e.u)] = find_root(parent, e.v);
  }
  // Clusters are visited in order of their smallest site.
  std::vector<double> cluster_field(form.n, 0.0);
  for (int s = 0; s < form.n; ++s) cluster_field[find_root(parent, s)] += form.fields[s];
  std::vector<int> new_value(form.n, -1);
  for (int s = 0; s < form.n; ++s) {
    const int r = find_root(parent, s);
    if (new_value[r] < 0) new_value[r] = state.rng.bernoulli(sigmoid(2.0 * beta * cluster_field[r])) ? 0 : 1;
    state.config[s] = new_value[r];
  }
  state.energy = h.energy(state.config);
}

std::string sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::glauber: return "glauber";
    case SamplerKind::swendsen_wang: return "sw";
    default: return "exact";
  }
}

SamplerKind sampler_from_name(const std::string& s) {
  if (s == "glauber") return SamplerKind::glauber;
  if (s == "sw" || s == "swendsen_wang") return SamplerKind::swendsen_wang;
  if (s == "exact") return SamplerKind::exact;
  throw ValidationError("unknown sampler '" + s + "'");
}

std::vector<SpinConfig> sample(const ClassicalHamiltonian& h, double beta, const SampleOptions& options) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and nonnegative");
  if (options.n_samples < 0) throw ValidationError("sample count must be nonnegative");
  const long long n = h.num_sites();
  std::vector<SpinConfig> out;
  out.reserve(options.n_samples);
  if (options.kind == SamplerKind::exact) {
    const GibbsDistribution d = exact_distribution(h, beta);
    std::vector<double> cdf(d.probs.size());
    std::partial_sum(d.probs.begin(), d.probs.end(), cdf.begin());
    Rng rng(options.seed);
    for (long long i = 0; i < options.n_samples; ++i) {
      const double u = rng.uniform() * cdf.back();
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const long long idx = std::min<long long>(it - cdf.begin(), static_cast<long long>(cdf.size()) - 1);
      out.push_back(config_from_index(idx, d.dims));
    }
    return out;
  }
  ChainState st = make_chain(h, options.seed);
  if (options.kind == SamplerKind::glauber) {
    const long long burn = (options.burn_in < 0 ? 100 * n : options.burn_in) * n;
    const long long thin = options.thinning < 0 ? n : options.thinning;
    for (long long i = 0; i < burn; ++i) glauber_step(st, h, beta);
    for (long long k = 0; k < options.n_samples; ++k) {
      for (long long i = 0; i < thin; ++i) glauber_step(st, h, beta);
      out.push_back(st.config);
    }
    return out;
  }
  const IsingForm form = extract_ferro_ising(h);
  const long long burn = options.burn_in < 0 ? 100 * n : options.burn_in;
  const long long thin = options.thinning < 0 ? 1 : options.thinning;
  for (long long i = 0; i < burn; ++i) swendsen_wang_step(st, h, form, beta);
  for (long long k = 0; k < options.n_samples; ++k) {
    for (long long i = 0; i < thin; ++i) swendsen_wang_step(st, h, form, beta);
    out.push_back(st.config);
  }
  return out;
}

std::vector<SpinConfig> sample_chains(const ClassicalHamiltonian& h, double beta, const SampleOptions& options,
                                      int chains, int threads) {
  if (chains < 1) throw ValidationError("chain count must be positive");
  if (chains == 1) return sample(h, beta, options);
  std::vector<std::vector<SpinConfig>> parts(chains);
  parallel_for(chains, threads, [&](long b, long e) {
    for (long c = b; c < e; ++c) {
      SampleOptions o = options;
      o.seed = options.seed + static_cast<uint64_t>(c);
      o.n_samples = options.n_samples * (c + 1) / chains - options.n_samples * c / chains;
      parts[c] = sample(h, beta, o);
    }
  });
  std::vector<SpinConfig> out;
  out.reserve(options.n_samples);
  for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  return out;
}

std::vector<double> empirical_distribution(const std::vector<SpinConfig>& samples, const std::vector<int>& dims) {
  long long n = 1;
  for (int d : dims) n *= d;
  if (n > kMaxExactConfigs) throw OutOfScopeError("histogram refuses more than 2^20 configurations");
  std::vector<double> p(n, 0.0);
  if (samples.empty()) return p;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (const SpinConfig& x : samples) p[config_index(x, dims)] += w;
  return p;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ValidationError("tv_distance: configuration spaces differ");
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv_distance(const std::vector<double>& empirical, const GibbsDistribution& exact) {
  return tv_distance(empirical, exact.probs);
}

std::vector<double> glauber_kernel_apply(const ClassicalHamiltonian& h, double beta, const std::vector<double>& p) {
  const long long n = h.num_configs();
  if (n > kMaxExactConfigs || static_cast<long long>(p.size()) != n)
    throw ValidationError("glauber_kernel_apply: distribution size mismatch");
  const std::vector<int>& dims = h.dims();
  const int sites = h.num_sites();
  std::vector<double> out(n, 0.0);
  for (long long i = 0; i < n; ++i) {
    if (p[i] == 0.0) continue;
    const SpinConfig x = config_from_index(i, dims);
    double stay = 1.0;
    for (int s = 0; s < sites; ++s) {
      long long stride = 1;
      for (int t = s + 1; t < sites; ++t) stride *= dims[t];
      for (int v = 0; v < dims[s]; ++v) {
        if (v == x[s]) continue;
        const double k = acceptance(beta, h.delta_energy(x, s, v)) / (static_cast<double>(sites) * dims[s]);
        out[i + (v - x[s]) * stride] += p[i] * k;
        stay -= k;
      }
    }
    out[i] += p[i] * stay;
  }
  return out;
}

}  // namespace clhgibbs
