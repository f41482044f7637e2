#include "onionlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "onionlab/error.hpp"
#include "onionlab/parallel.hpp"
#include "onionlab/peeling.hpp"
#include "onionlab/rescale.hpp"
#include "onionlab/sampler.hpp"

namespace onionlab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

double face_exponent(int d) { return static_cast<double>(d - 1) / (d + 1); }
double defect_exponent(int d) { return -2.0 / (d + 1); }
double layer_exponent(int d) { return 2.0 / (d + 1); }

double exponent_of(Quantity q, int d) {
  switch (q) {
    case Quantity::Faces:
      return face_exponent(d);
    case Quantity::Defect:
      return defect_exponent(d);
    case Quantity::TotalLayers:
      return layer_exponent(d);
  }
  return 0.0;
}

double stat_of(const std::vector<double>& v, Stat s) {
  const Summary sm = summarize(v);
  return s == Stat::Mean ? sm.mean : sm.variance;
}

// Replication seeds are keyed by lambda position so blocks stay independent.
SeedSpec block_seed(std::uint64_t master, std::size_t block, std::size_t rep) {
  return {stream_key({master, block}), rep};
}

Replication run_replication(const ExperimentPlan& plan, double lambda, const SeedSpec& seed) {
  const int d = plan.d;
  const PointCloud cloud = sample_ball_poisson(d, lambda, seed);
  Replication rep;
  rep.n_points = static_cast<std::int64_t>(cloud.size());
  rep.faces.assign(plan.n_max, std::vector<long long>(d + 1, 0));
  rep.defects.assign(plan.n_max, std::vector<double>(d + 1, kNaN));
  rep.dims.assign(plan.n_max, -1);

  PeelOptions opt;
  opt.max_layers = plan.full_peel ? 0 : plan.n_max;
  const PeelingDiagram dg = peel(cloud, opt);
  rep.total_layers = plan.full_peel ? total_layers(dg) : 0;

  const int mc = plan.volumes ? std::max(1, plan.mc_directions) : 0;
  const LayerStats st = layer_stats(dg, plan.n_max, mc, stream_key(seed));
  for (const LayerStat& ls : st.layers) {
    const int i = ls.n - 1;
    rep.dims[i] = ls.dim_hull;
    for (const auto& [k, c] : ls.face_counts) {
      if (k >= 0 && k <= d) rep.faces[i][k] = c;
    }
    for (std::size_t k = 0; k < ls.defect_volumes.size(); ++k) {
      if (ls.defect_volumes[k]) rep.defects[i][k] = *ls.defect_volumes[k];
    }
  }

  // Scores of all points must add up to the face counts exactly.
  for (int n = 1; n <= plan.n_max; ++n) {
    for (int k : plan.k_set) {
      if (k >= d) continue;
      Rational sum = 0;
      for (std::size_t i = 0; i < cloud.size(); ++i) sum += score(cloud.id(i), dg, n, k);
      if (sum != Rational(rep.faces[n - 1][k])) rep.score_identity = false;
    }
  }
  return rep;
}

}  // namespace

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::Faces:
      return "faces";
    case Quantity::Defect:
      return "defect";
    case Quantity::TotalLayers:
      return "total_layers";
  }
  return "?";
}

const char* to_string(Stat s) { return s == Stat::Mean ? "mean" : "variance"; }

void ExperimentPlan::validate() const {
  if (d < 2 || d > 6) throw InvalidInput("plan: d must be in [2, 6]");
  if (n_max < 1) throw InvalidInput("plan: n_max must be >= 1");
  if (k_set.empty()) throw InvalidInput("plan: k_set is empty");
  for (int k : k_set) {
    if (k < 0 || k > d) throw InvalidInput("plan: k_set entry " + std::to_string(k) + " is outside [0, d]");
  }
  if (replications < 2) throw InvalidInput("plan: replications must be >= 2");
  if (model == Model::Ball) {
    if (lambda_grid.empty()) throw InvalidInput("plan: lambda_grid is empty");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      if (!(lambda_grid[i] > 0.0)) throw InvalidInput("plan: lambda_grid entries must be positive");
      if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) {
        throw InvalidInput("plan: lambda_grid must be strictly increasing");
      }
    }
  } else {
    if (!(r > 0.0) || !(H > 0.0) || !(intensity > 0.0)) {
      throw InvalidInput("plan: r, H and intensity must be positive");
    }
    for (std::size_t i = 1; i < h_grid.size(); ++i) {
      if (!(h_grid[i] > h_grid[i - 1])) throw InvalidInput("plan: h_grid must be strictly increasing");
    }
  }
  if (volumes && mc_directions < 1) throw InvalidInput("plan: mc_directions must be >= 1 when volumes are on");
}

std::vector<double> replicate_values(const LambdaBlock& block, Quantity q, int n, int k, std::size_t first,
                                     std::size_t count) {
  std::vector<double> out;
  const std::size_t end = count > block.reps.size() ? block.reps.size() : std::min(block.reps.size(), first + count);
  for (std::size_t i = first; i < end; ++i) {
    const Replication& r = block.reps[i];
    switch (q) {
      case Quantity::Faces:
        if (n < 1 || n > static_cast<int>(r.faces.size())) throw InvalidInput("replicate_values: n out of range");
        out.push_back(static_cast<double>(r.faces[n - 1].at(k)));
        break;
      case Quantity::Defect: {
        if (n < 1 || n > static_cast<int>(r.defects.size())) throw InvalidInput("replicate_values: n out of range");
        const double v = r.defects[n - 1].at(k);
        if (!std::isnan(v)) out.push_back(v);
        break;
      }
      case Quantity::TotalLayers:
        out.push_back(static_cast<double>(r.total_layers));
        break;
    }
  }
  return out;
}

SlopeFit fit_loglog(const std::vector<double>& lambdas, const std::vector<std::vector<double>>& samples, Stat stat,
                    int groups) {
  if (lambdas.size() != samples.size()) throw InvalidInput("fit_loglog: lambdas and samples differ in length");
  if (lambdas.size() < 4) throw InvalidInput("fit_loglog: regression needs >= 4 grid points");
  std::size_t min_reps = samples.front().size();
  for (const auto& s : samples) min_reps = std::min(min_reps, s.size());
  if (groups < 2 || static_cast<std::size_t>(groups) > min_reps) {
    throw InvalidInput("fit_loglog: need at least `groups` >= 2 replicates per grid point");
  }

  std::vector<double> x(lambdas.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::log(lambdas[i]);
  auto fit_with = [&](int skip) {
    std::vector<double> y(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      std::vector<double> kept;
      for (std::size_t j = 0; j < samples[i].size(); ++j) {
        if (static_cast<int>(j % groups) != skip) kept.push_back(samples[i][j]);
      }
      const double s = stat_of(kept, stat);
      if (!(s > 0.0)) throw InvalidInput("fit_loglog: statistic is not positive, cannot take logs");
      y[i] = std::log(s);
    }
    return least_squares(x, y);
  };

  const LineFit full = fit_with(-1);
  std::vector<double> loo(groups);
  for (int g = 0; g < groups; ++g) loo[g] = fit_with(g).slope;
  const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / groups;
  double ss = 0.0;
  for (double s : loo) ss += (s - mean) * (s - mean);

  SlopeFit f;
  f.slope = full.slope;
  f.intercept = full.intercept;
  f.se = std::sqrt(ss * (groups - 1) / groups);
  f.half_width = t_quantile_975(groups - 1) * f.se;
  f.points = static_cast<int>(lambdas.size());
  f.groups = groups;
  return f;
}

SlopeFit fit_slope(const ExperimentResult& result, Quantity q, Stat stat, int n, int k, std::size_t first,
                   std::size_t count) {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> samples;
  for (const LambdaBlock& b : result.blocks) {
    lambdas.push_back(b.lambda);
    samples.push_back(replicate_values(b, q, n, k, first, count));
  }
  return fit_loglog(lambdas, samples, stat);
}

ExperimentResult run_ball_sweep(const ExperimentPlan& plan) {
  plan.validate();
  if (plan.model != Model::Ball) throw InvalidInput("run_ball_sweep: plan model must be ball");
  ExperimentResult result;
  result.plan = plan;
  const int threads = resolve_threads(plan.threads);
  for (std::size_t b = 0; b < plan.lambda_grid.size(); ++b) {
    LambdaBlock block;
    block.lambda = plan.lambda_grid[b];
    block.reps.resize(plan.replications);
    parallel_for(block.reps.size(), threads, [&](std::size_t i) {
      block.reps[i] = run_replication(plan, block.lambda, block_seed(plan.seed, b, i));
    });
    for (const Replication& r : block.reps) {
      if (r.dims[plan.n_max - 1] < 0) ++block.insufficient_layers;
      if (!r.score_identity) ++block.score_identity_failures;
    }
    result.blocks.push_back(std::move(block));
  }
  return result;
}

namespace {

ConstantEstimate rescaled_constant(const ExperimentResult& result, Quantity q, Stat stat, int n, int k) {
  if (result.blocks.empty()) throw InvalidInput("constant: empty sweep");
  const int d = result.plan.d;
  const double e = exponent_of(q, d);
  auto at = [&](const LambdaBlock& b, double& value, double& se, int& reps) {
    const auto v = replicate_values(b, q, n, k);
    const Summary s = summarize(v);
    const double scale = std::pow(b.lambda, -e);
    value = (stat == Stat::Mean ? s.mean : s.variance) * scale;
    se = (stat == Stat::Mean ? s.se_mean : s.se_variance) * scale;
    reps = s.count;
  };
  ConstantEstimate c;
  at(result.blocks.back(), c.value, c.se, c.reps);
  c.ci_low = c.value - 1.96 * c.se;
  c.ci_high = c.value + 1.96 * c.se;
  if (result.blocks.size() >= 2) {
    double prev = 0.0, prev_se = 0.0;
    int prev_reps = 0;
    at(result.blocks[result.blocks.size() - 2], prev, prev_se, prev_reps);
    c.diagnostic = prev - c.value;
    c.diagnostic_se = std::hypot(prev_se, c.se);
    c.stable = std::abs(c.diagnostic) <= 1.96 * c.diagnostic_se;
  }
  return c;
}

}  // namespace

ConstantEstimate estimate_constant_ball(const ExperimentResult& result, int n, int k, Quantity q) {
  return rescaled_constant(result, q, Stat::Mean, n, k);
}

ConstantEstimate estimate_variance_ball(const ExperimentResult& result, int n, int k) {
  return rescaled_constant(result, Quantity::Faces, Stat::Variance, n, k);
}

CltResult clt_from_values(const std::vector<double>& values) {
  CltResult r;
  r.reps = static_cast<int>(values.size());
  r.ks = ks_standard_normal(values);
  r.critical_5pct = 1.36 / std::sqrt(static_cast<double>(r.reps));
  return r;
}

CltResult clt_diagnostic(const ExperimentResult& result, std::size_t block, int n, int k) {
  const LambdaBlock& b = result.blocks.at(block);
  CltResult r = clt_from_values(replicate_values(b, Quantity::Faces, n, k));
  r.lambda = b.lambda;
  r.n = n;
  r.k = k;
  return r;
}

CltResult clt_diagnostic(ExperimentPlan plan, double lambda, int n, int k) {
  if (plan.replications < 300) throw InvalidInput("clt_diagnostic: needs >= 300 replications");
  plan.lambda_grid = {lambda};
  plan.n_max = std::max(plan.n_max, n);
  plan.k_set = {k};
  return clt_diagnostic(run_ball_sweep(plan), 0, n, k);
}

LayerScaling layer_count_scaling(const ExperimentResult& result) {
  if (!result.plan.full_peel) throw InvalidInput("layer_count_scaling: sweep was run without full peels");
  LayerScaling s;
  s.fit = fit_slope(result, Quantity::TotalLayers, Stat::Mean, 1, 0);
  const ConstantEstimate c = rescaled_constant(result, Quantity::TotalLayers, Stat::Mean, 1, 0);
  s.beta = c.value;
  s.beta_se = c.se;
  s.beta_previous = c.value + c.diagnostic;
  s.beta_previous_se = std::sqrt(std::max(0.0, c.diagnostic_se * c.diagnostic_se - c.se * c.se));
  return s;
}

LayerScaling layer_count_scaling(ExperimentPlan plan) {
  plan.full_peel = true;
  plan.volumes = false;
  if (plan.lambda_grid.size() < 4) throw InvalidInput("layer_count_scaling: needs >= 4 lambda values");
  return layer_count_scaling(run_ball_sweep(plan));
}

std::vector<ProfilePoint> layer_profile(double lambda, const std::vector<double>& t_grid, int replications,
                                        std::uint64_t seed, int d, double beta, int threads) {
  if (!(beta > 0.0)) throw InvalidInput("layer_profile: beta must be positive");
  if (replications < 2) throw InvalidInput("layer_profile: needs >= 2 replications");
  const double depth_scale = std::pow(lambda, 2.0 / (d + 1));
  const double count_scale = std::pow(lambda, -face_exponent(d));
  std::vector<int> layers;
  for (double t : t_grid) layers.push_back(std::max(1, static_cast<int>(std::floor(t * depth_scale))));

  std::vector<std::vector<double>> counts(replications, std::vector<double>(t_grid.size(), 0.0));
  parallel_for(static_cast<std::size_t>(replications), resolve_threads(threads), [&](std::size_t i) {
    const PointCloud cloud = sample_ball_poisson(d, lambda, {seed, i});
    const PeelingDiagram dg = peel(cloud);
    for (std::size_t j = 0; j < layers.size(); ++j) {
      if (layers[j] > dg.n_layers) continue;
      const auto fc = k_face_counts(dg.layers[layers[j] - 1]);
      const auto it = fc.find(0);
      counts[i][j] = it == fc.end() ? 0.0 : static_cast<double>(it->second);
    }
  });

  std::vector<ProfilePoint> out;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    std::vector<double> col(replications);
    for (int i = 0; i < replications; ++i) col[i] = counts[i][j] * count_scale;
    const Summary s = summarize(col);
    ProfilePoint p;
    p.t = t_grid[j];
    p.layer = layers[j];
    p.estimate = s.mean;
    p.se = s.se_mean;
    const double base = std::max(0.0, 1.0 - p.t / beta);
    p.conjecture = (d + 1) / (2.0 * beta) * std::pow(base, (d - 1) / 2.0);
    out.push_back(p);
  }
  return out;
}

std::vector<MonotonicityRow> monotonicity_table(const ExperimentResult& result, int k) {
  if (result.blocks.empty()) throw InvalidInput("monotonicity_table: empty sweep");
  const LambdaBlock& b = result.blocks.back();
  const int n_max = result.plan.n_max;
  const double scale = std::pow(b.lambda, -face_exponent(result.plan.d));
  std::vector<std::vector<double>> cols;
  std::vector<MonotonicityRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    cols.push_back(replicate_values(b, Quantity::Faces, n, k));
    const Summary s = summarize(cols.back());
    MonotonicityRow r;
    r.n = n;
    r.value = s.mean * scale;
    r.se = s.se_mean * scale;
    r.ci_low = r.value - 1.96 * r.se;
    r.ci_high = r.value + 1.96 * r.se;
    rows.push_back(r);
  }
  // Layers of one replication are dependent, so compare paired differences.
  for (int n = 1; n < n_max; ++n) {
    std::vector<double> diff(cols[n - 1].size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = (cols[n][i] - cols[n - 1][i]) * scale;
    const Summary s = summarize(diff);
    if (s.mean + 1.96 * s.se_mean < 0.0) {
      rows[n - 1].flag = "decreasing";
    } else if (s.mean - 1.96 * s.se_mean > 0.0) {
      rows[n - 1].flag = "increasing";
    } else {
      rows[n - 1].flag = "inconclusive";
    }
  }
  return rows;
}

namespace {

bool in_box(std::span<const double> w, const BoxCount& b) {
  const std::size_t m = b.v_lo.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (w[j] < b.v_lo[j] || w[j] >= b.v_hi[j]) return false;
  }
  return w[m] >= b.h_lo && w[m] < b.h_hi;
}

// Midpoint rule on a tensor grid; the density is smooth on each box.
double box_integral(const BoxCount& b, double lambda, int d) {
  const int m = d - 1;
  const int steps = m == 1 ? 400 : (m == 2 ? 60 : 16);
  std::vector<int> idx(d, 0);
  std::vector<double> v(m);
  double cell = (b.h_hi - b.h_lo) / steps;
  for (int j = 0; j < m; ++j) cell *= (b.v_hi[j] - b.v_lo[j]) / steps;
  double sum = 0.0;
  while (true) {
    for (int j = 0; j < m; ++j) v[j] = b.v_lo[j] + (idx[j] + 0.5) * (b.v_hi[j] - b.v_lo[j]) / steps;
    const double h = b.h_lo + (idx[m] + 0.5) * (b.h_hi - b.h_lo) / steps;
    sum += intensity_density(v, h, lambda, d);
    int j = 0;
    while (j < d && ++idx[j] == steps) idx[j++] = 0;
    if (j == d) break;
  }
  return sum * cell;
}

}  // namespace

std::vector<BoxCount> rescaled_intensity_check(int d, double lambda, std::vector<BoxCount> boxes, int replications,
                                               std::uint64_t seed, int threads) {
  if (replications < 2) throw InvalidInput("rescaled_intensity_check: needs >= 2 replications");
  for (const BoxCount& b : boxes) {
    if (static_cast<int>(b.v_lo.size()) != d - 1 || b.v_hi.size() != b.v_lo.size()) {
      throw InvalidInput("rescaled_intensity_check: box dimension must be d-1");
    }
  }
  std::vector<std::vector<double>> counts(replications, std::vector<double>(boxes.size(), 0.0));
  parallel_for(static_cast<std::size_t>(replications), resolve_threads(threads), [&](std::size_t i) {
    const RescaledCloud rc = to_rescaled(sample_ball_poisson(d, lambda, {seed, i}), lambda);
    for (std::size_t p = 0; p < rc.points.size(); ++p) {
      const auto w = rc.points.point(p);
      for (std::size_t j = 0; j < boxes.size(); ++j) {
        if (in_box(w, boxes[j])) counts[i][j] += 1.0;
      }
    }
  });
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    std::vector<double> col(replications);
    for (int i = 0; i < replications; ++i) col[i] = counts[i][j];
    const Summary s = summarize(col);
    boxes[j].mean = s.mean;
    boxes[j].se = s.se_mean;
    boxes[j].expected = box_integral(boxes[j], lambda, d);
  }
  return boxes;
}

}  // namespace onionlab
