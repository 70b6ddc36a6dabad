// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "clhgibbs/model_io.hpp"
#include "clhgibbs/reduction.hpp"
#include "clhgibbs/toric.hpp"

namespace clhgibbs {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitTolerance = 4;

struct ToleranceExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat key=value file; '#' starts a comment line.
std::vector<std::string> read_config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + " is not of the form key=value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    std::replace(key.begin(), key.end(), '_', '-');
    tokens.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  return tokens;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir + "'");
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_json(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

CommutingHamiltonian load_instance(const std::string& path) {
  CommutingHamiltonian h = parse_hamiltonian(path);
  const CommutationReport rep = verify_commuting(h);
  if (!rep.ok)
    throw ValidationError("terms " + std::to_string(h.terms[rep.violations[0].i].id) + " and " +
                          std::to_string(h.terms[rep.violations[0].j].id) + " do not commute (commutator norm " +
                          fmt17(rep.violations[0].norm) + ")");
  return h;
}

bool is_two_local(const CommutingHamiltonian& h) {
  for (const LocalTerm& t : h.terms)
    if (t.support.size() > 2) return false;
  return true;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json plan_to_json(const CommutingHamiltonian& h, const RemovalPlan& plan) {
  json j = {{"kept", plan.kept}, {"removed", plan.removed}, {"groups", plan.groups}, {"torus", plan.torus}};
  json corr = json::array();
  for (TermId id : plan.removed) {
    const CorrectionOperator c = find_correction(h, id);
    corr.push_back({{"term", c.term}, {"path", c.path}, {"operator", c.op.str()}});
  }
  j["corrections"] = corr;
  return j;
}

// ---------------------------------------------------------------- CSV

std::string samples_csv(const GibbsRun& run, const CommutingHamiltonian& h) {
  std::ostringstream os;
  if (run.pathway == Pathway::two_local) {
    for (size_t i = 0; i < run.classical_sites.size(); ++i) os << (i ? "," : "") << "s" << run.classical_sites[i];
    os << "\n";
    for (const SpinConfig& x : run.configs) {
      for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
      os << "\n";
    }
    return os.str();
  }
  std::vector<int> white, black;
  for (size_t i = 0; i < h.terms.size(); ++i) (h.terms[i].color == Color::white ? white : black).push_back(static_cast<int>(i));
  const bool parity = run.pathway == Pathway::torus;
  for (size_t i = 0; i < run.term_ids.size(); ++i) os << (i ? "," : "") << "p" << run.term_ids[i];
  if (parity) os << ",parity_white,parity_black";
  os << "\n";
  for (const Syndrome& s : run.syndromes) {
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    if (parity) {
      int pw = 1, pb = 1;
      for (int i : white) pw *= s[i];
      for (int i : black) pb *= s[i];
      os << "," << pw << "," << pb;
    }
    os << "\n";
  }
  return os.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<int>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read samples file '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("samples file is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(trim(cell));
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<int> row;
    try {
      while (std::getline(ss, cell, ',')) row.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw ValidationError("malformed samples row '" + line + "'");
    }
    if (row.size() != t.header.size()) throw ValidationError("samples row has the wrong number of columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- statistics

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size());
  return m;
}

// Typical TV of an n-sample histogram drawn from p.
double tv_noise(const std::vector<double>& p, long n) {
  if (n <= 0) return 1.0;
  double s = 0.0;
  for (double x : p) s += std::sqrt(x * (1.0 - x) / static_cast<double>(n));
  return 0.5 * std::sqrt(2.0 / M_PI) * s;
}

std::vector<double> syndrome_energies(const CommutingHamiltonian& h, const std::vector<Syndrome>& ss) {
  std::vector<double> e;
  for (const Syndrome& s : ss) {
    double v = 0.0;
    for (size_t i = 0; i < h.terms.size(); ++i) v += h.terms[i].coeff * s[i];
    e.push_back(v);
  }
  return e;
}

// Max TV over single-term marginals and consecutive-pair joint marginals,
// against independent per-term Boltzmann factors.
double marginal_tv(const CommutingHamiltonian& h, double beta, const std::vector<Syndrome>& ss) {
  const size_t k = h.terms.size();
  const double n = static_cast<double>(ss.size());
  std::vector<double> pminus(k);
  for (size_t i = 0; i < k; ++i) pminus[i] = sigmoid(2.0 * beta * h.terms[i].coeff);
  double worst = 0.0;
  for (size_t i = 0; i < k; ++i) {
    double cnt = 0.0;
    for (const Syndrome& s : ss) cnt += s[i] < 0;
    worst = std::max(worst, std::abs(cnt / n - pminus[i]));
    if (i + 1 == k) continue;
    double joint[4] = {0, 0, 0, 0};
    for (const Syndrome& s : ss) joint[(s[i] < 0) * 2 + (s[i + 1] < 0)] += 1.0 / n;
    double tv = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double p = (a ? pminus[i] : 1 - pminus[i]) * (b ? pminus[i + 1] : 1 - pminus[i + 1]);
        tv += std::abs(joint[a * 2 + b] - p);
      }
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

// Joint TV restricted to the term indices `terms`.
double subset_tv(const std::vector<Syndrome>& ss, const std::vector<int>& terms, const std::vector<double>& exact) {
  const int m = static_cast<int>(terms.size());
  std::vector<double> emp(exact.size(), 0.0);
  for (const Syndrome& s : ss) {
    long idx = 0;
    for (int j = 0; j < m; ++j) idx = idx * 2 + (s[terms[j]] < 0);
    emp[idx] += 1.0 / static_cast<double>(ss.size());
  }
  return tv_distance(emp, exact);
}

// ---------------------------------------------------------------- commands

struct SampleArgs {
  std::string instance;
  double beta = 1.0;
  uint64_t seed = 0;
  long long samples = 1000;
  long long burn_in = -1;
  long long sweeps = -1;
  std::string sampler = "glauber";
  std::string backend = "frame";
  std::string pathway = "auto";
  int chains = 1;
  std::string out = ".";
};

json sample_config(const SampleArgs& a) {
  return {{"instance", a.instance}, {"beta", a.beta},       {"seed", a.seed},       {"samples", a.samples},
          {"burn-in", a.burn_in},   {"sweeps", a.sweeps},   {"sampler", a.sampler}, {"backend", a.backend},
          {"pathway", a.pathway},   {"chains", a.chains}};
}

std::vector<std::string> sample_argv(const SampleArgs& a, const std::string& instance) {
  return {"sample",
          instance,
          "--beta=" + fmt17(a.beta),
          "--seed=" + std::to_string(a.seed),
          "--samples=" + std::to_string(a.samples),
          "--burn-in=" + std::to_string(a.burn_in),
          "--sweeps=" + std::to_string(a.sweeps),
          "--sampler=" + a.sampler,
          "--backend=" + a.backend,
          "--pathway=" + a.pathway,
          "--chains=" + std::to_string(a.chains)};
}

void cmd_sample(const SampleArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const CommutingHamiltonian h = load_instance(a.instance);
  if (!(a.beta >= 0.0) || !std::isfinite(a.beta)) throw ValidationError("--beta must be finite and nonnegative");
  if (a.samples < 0) throw ValidationError("--samples must be nonnegative");
  GibbsOptions opt;
  opt.classical.kind = sampler_from_name(a.sampler);
  opt.classical.n_samples = a.samples;
  opt.classical.seed = a.seed;
  opt.classical.burn_in = a.burn_in;
  opt.backend = backend_from_name(a.backend);
  opt.chains = a.chains;
  opt.threads = env_threads();
  opt.torus_burn_in = a.burn_in;
  if (a.sweeps >= 0) opt.torus_thinning = std::max<long long>(1, a.sweeps);
  GibbsRun run;
  if (a.pathway == "punctured") {
    if (!h.lattice || !h.all_pauli()) throw ValidationError("the punctured pathway needs a Pauli lattice instance");
    run.pathway = Pathway::orc;
    for (const LocalTerm& t : h.terms) run.term_ids.push_back(t.id);
    run.syndromes = punctured_sample(h, a.beta, a.samples, a.seed, opt.threads);
  } else if (a.pathway == "auto") {
    if (a.sweeps >= 0) {
      long n = 1;
      if (is_two_local(h)) n = static_cast<long>(h.site_dims.size());
      else if (h.lattice) n = static_cast<long>(plan_removal(h).groups.size());
      opt.classical.thinning = opt.classical.kind == SamplerKind::glauber ? a.sweeps * n : a.sweeps;
    }
    run = sample_gibbs_clh(h, a.beta, opt);
  } else {
    throw ValidationError("unknown pathway '" + a.pathway + "'");
  }
  ensure_dir(a.out);
  write_text_file(join_path(a.out, "samples.csv"), samples_csv(run, h));
  std::vector<double> energies;
  if (run.pathway == Pathway::two_local) {
    const Classicalization cl = classicalize_2local(h);
    for (const SpinConfig& x : run.configs) energies.push_back(cl.classical.energy(x));
  } else {
    energies = syndrome_energies(h, run.syndromes);
  }
  const Moments m = moments(energies);
  write_json(join_path(a.out, "summary.json"),
             {{"pathway", pathway_name(run.pathway)}, {"n", energies.size()}, {"energy_mean", m.mean},
              {"energy_var", m.var}});
  // Replay needs the instance itself, not its path.
  json prov = {{"tool", "clhgibbs"},
               {"version", kVersion},
               {"command", "sample"},
               {"config", sample_config(a)},
               {"argv", sample_argv(a, "instance.json")},
               {"instance_json", hamiltonian_to_json(h)},
               {"pathway", pathway_name(run.pathway)},
               {"threads", opt.threads},
               {"outputs", {"samples.csv", "summary.json"}}};
  if (run.plan) prov["plan"] = plan_to_json(h, *run.plan);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  prov["timings"] = {{"total_seconds", secs}};
  write_json(join_path(a.out, "provenance.json"), prov);
}

struct BuildArgs {
  std::string kind;
  int L = 4;
  std::string topology = "plane";
  double coeff = -1.0;
  std::string coeff_file;
  int missing_white = -1, missing_black = -1;
  int n = 8;
  double J = 1.0, field = 0.0;
  bool periodic = false, open = false;
  std::string in, out;
};

void cmd_build(const BuildArgs& a) {
  CommutingHamiltonian h;
  if (a.kind == "toric") {
    std::map<TermId, double> coeffs;
    if (!a.coeff_file.empty()) {
      json j = read_json_file(a.coeff_file);
      if (j.contains("coeffs")) j = j.at("coeffs");
      if (!j.is_object()) throw ValidationError("coefficient file must map plaquette ids to numbers");
      for (const auto& [k, v] : j.items()) {
        try {
          coeffs[std::stoi(k)] = v.get<double>();
        } catch (const std::exception&) {
          throw ValidationError("malformed coefficient entry '" + k + "'");
        }
      }
    }
    h = build_defected_toric(a.L, coeffs, topology_from_name(a.topology), a.coeff, a.missing_white, a.missing_black);
  } else if (a.kind == "ising1d") {
    h = build_ising1d(a.n, a.J, a.field, a.periodic);
  } else if (a.kind == "ising2d") {
    h = build_ising2d(a.L, a.J, a.field, !a.open);
  } else if (a.kind == "custom-json") {
    if (a.in.empty()) throw ValidationError("custom-json needs --in");
    h = load_instance(a.in);
  } else {
    throw ValidationError("unknown instance kind '" + a.kind + "'");
  }
  const CommutationReport rep = verify_commuting(h);
  if (!rep.ok) throw ValidationError("constructed terms do not commute");
  const std::string text = hamiltonian_to_json(h).dump(2) + "\n";
  if (a.out.empty())
    std::cout << text;
  else
    write_text_file(a.out, text);
}

void cmd_reduce(const std::string& instance, const std::string& out) {
  const CommutingHamiltonian h = load_instance(instance);
  ensure_dir(out);
  if (is_two_local(h)) {
    const Classicalization cl = classicalize_2local(h);
    json sites = json::array();
    bool identity = true;
    for (const BlockDecomposition& d : cl.map.decomps) {
      json blocks = json::array();
      for (const Block& b : d.blocks)
        blocks.push_back({{"factor_dims", b.factor_dims}, {"free_dim", b.free_dim}, {"isometry", mat_to_json(b.isometry)}});
      sites.push_back({{"site", d.site}, {"dim", d.dim}, {"incident_terms", d.incident}, {"blocks", blocks}});
      const Mat u = d.unitary();
      identity &= (u - Mat::Identity(u.rows(), u.cols())).norm() < 1e-12;
    }
    write_json(join_path(out, "classical.json"), cl.classical.to_json());
    write_json(join_path(out, "plan.json"), {{"pathway", "two-local"}, {"identity", identity}});
    write_json(join_path(out, "basis.json"), {{"kind", "structure"}, {"sites", sites}});
    std::cout << "two-local reduction: " << cl.classical.num_sites() << " classical sites, "
              << cl.classical.terms().size() << " terms" << (identity ? " (identity map)" : "") << "\n";
    return;
  }
  if (!h.lattice) throw OutOfScopeError("terms on more than two sites need lattice geometry");
  const RemovalPlan plan = plan_removal(h);
  json pj = plan_to_json(h, plan);
  if (plan.torus) {
    pj["pathway"] = "torus";
    const TorusChainMap w = torus_chain_map(h, Color::white), b = torus_chain_map(h, Color::black);
    auto ids = [&](const TorusChainMap& m) {
      std::vector<TermId> v;
      for (int i : m.order) v.push_back(h.terms[i].id);
      return v;
    };
    write_json(join_path(out, "classical.json"),
               {{"kind", "torus-rings"}, {"white", w.ring.to_json()}, {"black", b.ring.to_json()}});
    json strings = json::array();
    for (const TorusChainMap* m : {&w, &b})
      for (const CorrectionOperator& c : m->strings)
        strings.push_back({{"color", color_name(m->color)}, {"term", c.term}, {"path", c.path}, {"operator", c.op.str()}});
    write_json(join_path(out, "basis.json"),
               {{"kind", "torus-chains"}, {"white_order", ids(w)}, {"black_order", ids(b)}, {"strings", strings}});
    write_json(join_path(out, "plan.json"), pj);
    std::cout << "torus: two Ising rings of " << w.order.size() << " and " << b.order.size() << " spins\n";
    return;
  }
  pj["pathway"] = "oblivious-correction";
  const ToricClassicalMap tmap = toric_classicalize(h, plan);
  json groups = json::array();
  for (size_t g = 0; g < tmap.bases.size(); ++g) {
    json st = json::array(), ds = json::array();
    for (const PauliString& p : tmap.bases[g].stabilizers) st.push_back(p.str());
    for (const PauliString& p : tmap.bases[g].destabilizers) ds.push_back(p.str());
    groups.push_back({{"group", plan.group_id(static_cast<int>(g))},
                      {"qubits", tmap.bases[g].qubits},
                      {"stabilizers", st},
                      {"destabilizers", ds}});
  }
  write_json(join_path(out, "classical.json"), tmap.classical.to_json());
  write_json(join_path(out, "plan.json"), pj);
  write_json(join_path(out, "basis.json"), {{"kind", "virtual-qubits"}, {"groups", groups}});
  std::cout << "removal plan: " << plan.kept.size() << " kept, " << plan.removed.size() << " removed, "
            << plan.groups.size() << " grouped qudits\n";
}

struct CompareArgs {
  std::string instance, samples, out;
  double beta = 1.0;
  double tol = 0.02;
};

void cmd_compare(const CompareArgs& a) {
  const CommutingHamiltonian h = load_instance(a.instance);
  const CsvTable t = read_csv(a.samples);
  json report = {{"n", t.rows.size()}, {"beta", a.beta}, {"tolerance", a.tol}};
  std::optional<double> tv;
  const bool syndromes = !t.header.empty() && t.header[0].rfind("p", 0) == 0 && t.header[0].rfind("parity", 0) != 0;
  if (!syndromes) {
    const Classicalization cl = classicalize_2local(h);
    if (t.header.size() != cl.map.sites.size()) throw ValidationError("samples do not match the instance's sites");
    std::vector<SpinConfig> xs(t.rows.begin(), t.rows.end());
    for (const SpinConfig& x : xs)
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < 0 || x[i] >= cl.map.dims[i]) throw ValidationError("sample value out of range");
    std::vector<double> energies;
    for (const SpinConfig& x : xs) energies.push_back(cl.classical.energy(x));
    const Moments m = moments(energies);
    report["energy_mean"] = m.mean;
    report["energy_var"] = m.var;
    if (cl.classical.num_configs() <= (1LL << 20)) {
      const GibbsDistribution d = exact_distribution(cl.classical, a.beta);
      const std::vector<double> emp = empirical_distribution(xs, d.dims);
      tv = tv_distance(emp, d);
      report["tv_kind"] = "joint";
      report["tv_expected_noise"] = tv_noise(d.probs, static_cast<long>(xs.size()));
      double em = 0.0;
      for (size_t k = 0; k < d.probs.size(); ++k) em += d.probs[k] * cl.classical.energy(config_from_index(k, d.dims));
      report["exact_energy_mean"] = em;
      if (h.total_dim() <= 4096) {
        const DensityMatrixState rho = exact_gibbs_state(h, a.beta);
        report["trace_distance"] = trace_distance(cl.map.mixture(emp), rho.rho);
      }
    } else {
      report["warning"] = "oracle infeasible; energy statistics only";
    }
  } else {
    std::vector<int> cols;
    for (size_t i = 0; i < h.terms.size(); ++i) {
      const std::string want = "p" + std::to_string(h.terms[i].id);
      auto it = std::find(t.header.begin(), t.header.end(), want);
      if (it == t.header.end()) throw ValidationError("samples lack column " + want);
      cols.push_back(static_cast<int>(it - t.header.begin()));
    }
    std::vector<Syndrome> ss;
    for (const auto& row : t.rows) {
      Syndrome s;
      for (int c : cols) {
        if (row[c] != 1 && row[c] != -1) throw ValidationError("syndrome entries must be +-1");
        s.push_back(row[c]);
      }
      ss.push_back(std::move(s));
    }
    const Moments m = moments(syndrome_energies(h, ss));
    report["energy_mean"] = m.mean;
    report["energy_var"] = m.var;
    const bool torus = h.lattice && h.lattice->topology == Topology::torus;
    if (torus) {
      double worst = 0.0;
      bool parity_ok = true;
      for (Color c : {Color::white, Color::black}) {
        std::vector<int> idx;
        for (size_t i = 0; i < h.terms.size(); ++i)
          if (h.terms[i].color == c) idx.push_back(static_cast<int>(i));
        for (const Syndrome& s : ss) {
          int p = 1;
          for (int i : idx) p *= s[i];
          parity_ok &= p == 1;
        }
        if (idx.size() > 20) {
          report["warning"] = "per-colour enumeration infeasible; energy statistics only";
          worst = -1.0;
          break;
        }
        const std::vector<double> exact = syndrome_distribution(h, a.beta, idx, true);
        const double d = subset_tv(ss, idx, exact);
        report["tv_" + color_name(c)] = d;
        report["tv_expected_noise_" + color_name(c)] = tv_noise(exact, static_cast<long>(ss.size()));
        worst = std::max(worst, d);
      }
      report["parity_ok"] = parity_ok;
      if (worst >= 0.0) {
        tv = worst;
        report["tv_kind"] = "per-colour joint";
      }
    } else if (h.terms.size() <= 20) {
      std::vector<int> idx(h.terms.size());
      std::iota(idx.begin(), idx.end(), 0);
      const std::vector<double> exact = syndrome_distribution(h, a.beta, idx, false);
      tv = subset_tv(ss, idx, exact);
      report["tv_kind"] = "joint";
      report["tv_expected_noise"] = tv_noise(exact, static_cast<long>(ss.size()));
    } else {
      tv = marginal_tv(h, a.beta, ss);
      report["tv_kind"] = "max single and adjacent-pair marginal";
    }
  }
  if (tv) report["tv"] = *tv;
  report["pass"] = !tv || *tv <= a.tol;
  std::cout << "samples            " << t.rows.size() << "\n";
  std::cout << "energy mean        " << fmt17(report["energy_mean"].get<double>()) << "\n";
  if (tv) std::cout << "tv (" << report["tv_kind"].get<std::string>() << ")  " << fmt17(*tv) << "\n";
  if (report.contains("tv_expected_noise"))
    std::cout << "expected noise     " << fmt17(report["tv_expected_noise"].get<double>()) << "\n";
  if (report.contains("trace_distance"))
    std::cout << "trace distance     " << fmt17(report["trace_distance"].get<double>()) << "\n";
  if (report.contains("warning")) std::cout << "warning: " << report["warning"].get<std::string>() << "\n";
  if (!a.out.empty()) {
    ensure_dir(a.out);
    write_json(join_path(a.out, "report.json"), report);
  }
  if (tv && *tv > a.tol) throw ToleranceExceeded("tv " + fmt17(*tv) + " exceeds tolerance " + fmt17(a.tol));
}

struct MixingArgs {
  std::string instance, out = ".";
  double beta = 1.0;
  std::string sampler = "glauber";
  long long horizon = 100;
  int chains = 256;
  uint64_t seed = 0;
};

void cmd_mixing(const MixingArgs& a) {
  const CommutingHamiltonian h = load_instance(a.instance);
  ClassicalHamiltonian hc;
  if (is_two_local(h)) {
    hc = classicalize_2local(h).classical;
  } else {
    if (!h.lattice) throw OutOfScopeError("terms on more than two sites need lattice geometry");
    const RemovalPlan plan = plan_removal(h);
    if (plan.torus) throw OutOfScopeError("mixing curves for the torus pathway are not supported");
    hc = toric_classicalize(h, plan).classical;
  }
  if (hc.num_configs() > (1LL << 20)) throw OutOfScopeError("classical oracle infeasible: more than 2^20 configurations");
  if (a.horizon < 0 || a.chains < 1) throw ValidationError("--horizon must be >= 0 and --chains >= 1");
  const SamplerKind kind = sampler_from_name(a.sampler);
  if (kind == SamplerKind::exact) throw ValidationError("mixing needs a Markov-chain sampler");
  const GibbsDistribution pi = exact_distribution(hc, a.beta);
  const int n = hc.num_sites();
  std::vector<long long> checkpoints = {0};
  for (double t = 1; t <= static_cast<double>(a.horizon); t *= 1.5) {
    const long long c = static_cast<long long>(std::llround(t));
    if (c != checkpoints.back()) checkpoints.push_back(c);
  }
  if (checkpoints.back() != a.horizon) checkpoints.push_back(a.horizon);
  std::vector<ChainState> chains;
  for (int c = 0; c < a.chains; ++c) chains.push_back(make_chain(hc, a.seed + static_cast<uint64_t>(c)));
  const IsingForm form = kind == SamplerKind::swendsen_wang ? extract_ferro_ising(hc) : IsingForm{};
  std::vector<double> exact_dist(pi.probs.size(), 1.0 / static_cast<double>(pi.probs.size()));
  std::ostringstream os;
  os << "sweeps,tv_exact,tv_ensemble\n";
  long long done = 0;
  for (long long cp : checkpoints) {
    for (; done < cp; ++done) {
      for (ChainState& st : chains) {
        if (kind == SamplerKind::glauber)
          for (int s = 0; s < n; ++s) glauber_step(st, hc, a.beta);
        else
          swendsen_wang_step(st, hc, form, a.beta);
      }
      if (kind == SamplerKind::glauber)
        for (int s = 0; s < n; ++s) exact_dist = glauber_kernel_apply(hc, a.beta, exact_dist);
    }
    std::vector<SpinConfig> xs;
    for (const ChainState& st : chains) xs.push_back(st.config);
    const double ens = tv_distance(empirical_distribution(xs, pi.dims), pi);
    os << cp << "," << (kind == SamplerKind::glauber ? fmt17(tv_distance(exact_dist, pi)) : std::string("")) << ","
       << fmt17(ens) << "\n";
  }
  ensure_dir(a.out);
  write_text_file(join_path(a.out, "mixing.csv"), os.str());
  std::cout << os.str();
}

int dispatch(std::vector<std::string> args) {
  // --config FILE: its tokens go right after the subcommand path so that
  // explicit flags (parsed later) win.
  std::vector<std::string> cfg;
  for (size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      continue;
    }
    cfg = read_config_tokens(path);
    break;
  }
  if (!cfg.empty() && !args.empty()) {
    const size_t at = (args[0] == "build" && args.size() > 1) ? 2 : 1;
    args.insert(args.begin() + static_cast<long>(at), cfg.begin(), cfg.end());
  }

  CLI::App app{"clhgibbs: Gibbs sampling for commuting local Hamiltonians"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  // -h is the field strength of the Ising builders.
  app.set_help_flag("--help", "print this help message and exit");

  BuildArgs b;
  CLI::App* build = app.add_subcommand("build", "write a model JSON instance");
  build->add_option("kind", b.kind, "toric | ising1d | ising2d | custom-json")->required();
  build->add_option("--L", b.L, "lattice side");
  build->add_option("--topology", b.topology, "plane | torus | punctured");
  build->add_option("--coeff", b.coeff, "default plaquette coefficient");
  build->add_option("--coeff-file", b.coeff_file, "JSON object plaquette id -> coefficient");
  build->add_option("--missing-white", b.missing_white);
  build->add_option("--missing-black", b.missing_black);
  build->add_option("--n", b.n, "chain length");
  build->add_option("--J", b.J, "coupling");
  build->add_option("--h", b.field, "field");
  build->add_flag("--periodic", b.periodic, "periodic chain");
  build->add_flag("--open", b.open, "open 2D boundary");
  build->add_option("--in", b.in, "custom-json input");
  build->add_option("--out", b.out, "output file (stdout if absent)");

  std::string red_instance, red_out = ".";
  CLI::App* reduce = app.add_subcommand("reduce", "emit classical Hamiltonian, plan and basis records");
  reduce->add_option("instance", red_instance)->required();
  reduce->add_option("--out", red_out);

  SampleArgs s;
  CLI::App* samp = app.add_subcommand("sample", "sample syndromes or classical configurations");
  samp->add_option("instance", s.instance)->required();
  samp->add_option("--beta", s.beta);
  samp->add_option("--seed", s.seed);
  samp->add_option("--samples", s.samples);
  samp->add_option("--burn-in", s.burn_in, "sweeps (SW steps); -1 = default");
  samp->add_option("--sweeps", s.sweeps, "sweeps between samples; -1 = default");
  samp->add_option("--sampler", s.sampler, "glauber | sw | exact");
  samp->add_option("--backend", s.backend, "frame | dense");
  samp->add_option("--pathway", s.pathway, "auto | punctured");
  samp->add_option("--chains", s.chains, "independent chains");
  samp->add_option("--out", s.out);

  CompareArgs c;
  CLI::App* cmp = app.add_subcommand("compare", "compare samples with the exact oracle");
  cmp->add_option("--instance", c.instance)->required();
  cmp->add_option("--samples", c.samples)->required();
  cmp->add_option("--beta", c.beta);
  cmp->add_option("--tol", c.tol);
  cmp->add_option("--out", c.out);

  MixingArgs m;
  CLI::App* mix = app.add_subcommand("mixing", "TV-versus-sweeps curve");
  mix->add_option("instance", m.instance)->required();
  mix->add_option("--beta", m.beta);
  mix->add_option("--sampler", m.sampler);
  mix->add_option("--horizon", m.horizon);
  mix->add_option("--chains", m.chains, "ensemble size");
  mix->add_option("--seed", m.seed);
  mix->add_option("--out", m.out);

  std::string rp_file, rp_out = "replay";
  CLI::App* replay = app.add_subcommand("replay", "re-run a sample command from its provenance record");
  replay->add_option("provenance", rp_file)->required();
  replay->add_option("--out", rp_out);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (build->parsed()) cmd_build(b);
  if (reduce->parsed()) cmd_reduce(red_instance, red_out);
  if (samp->parsed()) cmd_sample(s);
  if (cmp->parsed()) cmd_compare(c);
  if (mix->parsed()) cmd_mixing(m);
  if (replay->parsed()) {
    const json prov = read_json_file(rp_file);
    if (prov.value("command", "") != "sample" || !prov.contains("argv") || !prov.contains("instance_json"))
      throw ValidationError("provenance record is not a replayable sample run");
    ensure_dir(rp_out);
    serialize_hamiltonian(hamiltonian_from_json(prov.at("instance_json")), join_path(rp_out, "instance.json"));
    std::vector<std::string> argv = prov.at("argv").get<std::vector<std::string>>();
    argv.at(1) = join_path(rp_out, "instance.json");
    argv.push_back("--out=" + rp_out);
    return dispatch(argv);
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const ToleranceExceeded& e) {
    std::cerr << "tolerance exceeded: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const OutOfScopeError& e) {
    std::cerr << "out of scope: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace clhgibbs
