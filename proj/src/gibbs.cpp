#include "surflab/gibbs.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "surflab/stats.hpp"

namespace surflab {
namespace {

void validate(const FunctionalModel& m, const ChainOptions& opt) {
  if (opt.sweeps <= 0 || opt.burnin < 0 || opt.thin <= 0 || opt.burnin >= opt.sweeps)
    throw std::invalid_argument("chain: need sweeps > burnin >= 0, thin > 0");
  for (int p : opt.probes)
    if (p < 0 || p >= m.num_functionals())
      throw std::invalid_argument("chain: probe id out of range");
  for (int v : opt.vertex_probes)
    if (v < 0 || v >= m.n) throw std::invalid_argument("chain: vertex probe out of range");
  for (int v : opt.var_vertices)
    if (v < 0 || v >= m.n) throw std::invalid_argument("chain: var vertex out of range");
}

bool should_record(const ChainOptions& o, int sweep) {
  return sweep >= o.burnin && (sweep - o.burnin) % o.thin == 0;
}

struct Recorder {
  const FunctionalModel& m;
  const ChainOptions& opt;
  ChainResult& res;

  void init() {
    size_t np = opt.probes.size() + opt.vertex_probes.size();
    res.probe.assign(np, {});
    res.tail.assign(np, std::vector<long>(kTailLevels, 0));
    res.rb_var.assign(opt.var_vertices.size(), {});
    if (opt.track_vertex_moments) {
      res.vertex_mean.assign(m.n, 0.0);
      res.vertex_second.assign(m.n, 0.0);
    }
  }

  void push_probe(size_t p, double d) {
    res.probe[p].push_back(d);
    double ad = std::fabs(d);
    for (int k = 0; k < kTailLevels && ad >= tail_threshold(k); k++) res.tail[p][k]++;
  }

  void record(const Vec& phi, const std::vector<double>* xi, const GaussianField* gf) {
    for (size_t p = 0; p < opt.probes.size(); p++)
      push_probe(p, functional_value(m.functionals[opt.probes[p]], phi));
    for (size_t p = 0; p < opt.vertex_probes.size(); p++)
      push_probe(opt.probes.size() + p, phi[opt.vertex_probes[p]]);
    res.maxes.push_back(phi.maxCoeff());
    res.mins.push_back(phi.minCoeff());
    if (xi) {
      double s = 0;
      long c = 0;
      for (int f = 0; f < m.num_functionals(); f++) {
        if (m.functionals[f].inf_resistance) continue;
        s += (*xi)[f];
        c++;
      }
      res.mean_xi.push_back(c ? s / c : 0.0);
    }
    if (gf)
      for (size_t i = 0; i < opt.var_vertices.size(); i++)
        res.rb_var[i].push_back(gf->variance(opt.var_vertices[i]));
    if (opt.track_xi && xi) res.xi_trace.push_back(*xi);
    if (opt.track_vertex_moments)
      for (int v = 0; v < m.n; v++) {
        res.vertex_mean[v] += phi[v];
        res.vertex_second[v] += phi[v] * phi[v];
      }
    res.nrec++;
  }

  void finish(const char* name, double acceptance) {
    if (opt.track_vertex_moments && res.nrec) {
      for (double& v : res.vertex_mean) v /= res.nrec;
      for (double& v : res.vertex_second) v /= res.nrec;
    }
    res.report.sampler = name;
    res.report.sweeps = opt.sweeps;
    res.report.recorded = (int)res.nrec;
    res.report.acceptance = acceptance;
    const std::vector<double>& series = !res.probe.empty() ? res.probe[0] : res.maxes;
    res.report.iat = integrated_autocorrelation(series);
    res.report.ess = res.report.iat > 0 ? res.nrec / res.report.iat : 0;
  }
};

}  // namespace

ChainResult run_mixture_exact(const FunctionalModel& m, const MixtureMeasure& rho,
                              const ChainOptions& opt) {
  validate(m, opt);
  Rng rng = make_rng(opt.seed);
  ChainResult res;
  res.phi = Vec::Zero(m.n);
  res.xi.assign(m.num_functionals(), rho.median());
  Recorder rec{m, opt, res};
  rec.init();
  for (int sweep = 0; sweep < opt.sweeps; sweep++) {
    // scan order: xi | phi by ascending row id, then one full phi redraw
    for (int f = 0; f < m.num_functionals(); f++) {
      if (m.functionals[f].inf_resistance) continue;
      double d = functional_value(m.functionals[f], res.phi);
      res.xi[f] = rho.sample_posterior(d, rng);
    }
    GaussianField gf(m, res.xi, opt.backend);
    res.phi = gf.sample(rng);
    if (should_record(opt, sweep)) rec.record(res.phi, &res.xi, &gf);
  }
  rec.finish("mixture-exact", 1.0);
  return res;
}

ChainResult run_splice(const FunctionalModel& m, const MixtureMeasure& rho,
                       const Potential& W, const ChainOptions& opt) {
  validate(m, opt);
  Rng rng = make_rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ChainResult res;
  res.phi = Vec::Zero(m.n);
  res.xi.assign(m.num_functionals(), rho.median());
  Recorder rec{m, opt, res};
  rec.init();

  auto w_energy = [&](const Vec& phi) {
    double s = 0;
    for (int f = 0; f < m.num_functionals(); f++) {
      if (m.functionals[f].inf_resistance) continue;
      s += W(functional_value(m.functionals[f], phi));
    }
    return s;
  };
  double wcur = w_energy(res.phi);
  long accepted = 0;
  for (int sweep = 0; sweep < opt.sweeps; sweep++) {
    for (int f = 0; f < m.num_functionals(); f++) {
      if (m.functionals[f].inf_resistance) continue;
      double d = functional_value(m.functionals[f], res.phi);
      res.xi[f] = rho.sample_posterior(d, rng);
    }
    GaussianField gf(m, res.xi, opt.backend);
    Vec prop = gf.sample(rng);
    double wprop = w_energy(prop);
    if (wprop <= wcur || unif(rng) < std::exp(wcur - wprop)) {
      res.phi = prop;
      wcur = wprop;
      accepted++;
    }
    if (should_record(opt, sweep)) rec.record(res.phi, &res.xi, &gf);
  }
  rec.finish("splice", double(accepted) / opt.sweeps);
  return res;
}

ChainResult run_metropolis(const FunctionalModel& m, const Potential& U, double step,
                           const ChainOptions& opt) {
  validate(m, opt);
  if (step <= 0) throw std::invalid_argument("run_metropolis: step > 0");
  Rng rng = make_rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  // vertex -> (row, coefficient) over live rows
  std::vector<std::vector<std::pair<int, double>>> incidence(m.n);
  for (int f = 0; f < m.num_functionals(); f++) {
    if (m.functionals[f].inf_resistance) continue;
    for (auto [v, c] : m.functionals[f].entries) incidence[v].push_back({f, c});
  }
  std::vector<double> delta(m.num_functionals(), 0.0);

  ChainResult res;
  res.phi = Vec::Zero(m.n);
  Recorder rec{m, opt, res};
  rec.init();
  long accepted = 0, proposed = 0;
  for (int sweep = 0; sweep < opt.sweeps; sweep++) {
    for (int v = 0; v < m.n; v++) {
      double dv = step * normal(rng);
      double dE = 0;
      for (auto [f, c] : incidence[v]) dE += U(delta[f] + c * dv) - U(delta[f]);
      proposed++;
      if (dE <= 0 || unif(rng) < std::exp(-dE)) {
        res.phi[v] += dv;
        for (auto [f, c] : incidence[v]) delta[f] += c * dv;
        accepted++;
      }
    }
    if (should_record(opt, sweep)) rec.record(res.phi, nullptr, nullptr);
  }
  rec.finish("metropolis", proposed ? double(accepted) / proposed : 0.0);
  return res;
}

}  // namespace surflab
