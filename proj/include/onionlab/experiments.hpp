#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "onionlab/stats.hpp"

namespace onionlab {

enum class Model { Ball, Parabolic };

struct ExperimentPlan {
  Model model = Model::Ball;
  int d = 2;
  int n_max = 3;
  std::vector<int> k_set{0};
  std::vector<double> lambda_grid{500, 1000, 2000, 4000, 8000};
  int replications = 200;
  std::uint64_t seed = 1;
  /// Defect intrinsic volumes per layer (Kubota directions for 1 <= k <= d-2).
  bool volumes = false;
  int mc_directions = 256;
  /// Peel every replication to the end (needed for total layer counts).
  bool full_peel = false;
  int threads = 0;

  // Parabolic model.
  double r = 8.0;
  double H = 20.0;
  double intensity = 1.0;
  std::vector<double> h_grid;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

/// Everything recorded for one replication of the ball model.
struct Replication {
  std::int64_t n_points = 0;
  /// faces[n-1][k], k = 0..d; zero for absent layers.
  std::vector<std::vector<long long>> faces;
  /// defects[n-1][k], k = 0..d; NaN for absent or lower-dimensional layers.
  std::vector<std::vector<double>> defects;
  std::vector<int> dims;  // dim_hull per layer, -1 if absent
  int total_layers = 0;   // 0 unless the plan asks for full peels
  bool score_identity = true;
};

struct LambdaBlock {
  double lambda = 0.0;
  std::vector<Replication> reps;
  int insufficient_layers = 0;  // replications with fewer than n_max layers
  int score_identity_failures = 0;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<LambdaBlock> blocks;
};

enum class Quantity { Faces, Defect, TotalLayers };
enum class Stat { Mean, Variance };

const char* to_string(Quantity q);
const char* to_string(Stat s);

/// Replicate values of a quantity in one block; NaN defects are dropped.
/// Replications [first, first + count) only.
std::vector<double> replicate_values(const LambdaBlock& block, Quantity q, int n, int k, std::size_t first = 0,
                                     std::size_t count = std::numeric_limits<std::size_t>::max());

/// Log-log slope with a grouped jackknife over replications.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;
  double half_width = 0.0;  // t_{0.975, groups-1} * se
  int points = 0;
  int groups = 0;
};

/// Fits log(stat) against log(lambda). samples[i] holds the replicate
/// values at lambdas[i]; replicate j belongs to jackknife group j % groups.
SlopeFit fit_loglog(const std::vector<double>& lambdas, const std::vector<std::vector<double>>& samples, Stat stat,
                    int groups = 20);

SlopeFit fit_slope(const ExperimentResult& result, Quantity q, Stat stat, int n, int k, std::size_t first = 0,
                   std::size_t count = std::numeric_limits<std::size_t>::max());

ExperimentResult run_ball_sweep(const ExperimentPlan& plan);

struct ConstantEstimate {
  double value = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int reps = 0;
  /// Ball route: rescaled value at the second largest lambda minus the largest, and its SE.
  double diagnostic = 0.0;
  double diagnostic_se = 0.0;
  bool stable = true;
};

/// lambda^(-(d-1)/(d+1)) E[N_{n,k}] (faces) or lambda^(2/(d+1)) E[V_{n,k}] (defects)
/// at the largest lambda.
ConstantEstimate estimate_constant_ball(const ExperimentResult& result, int n, int k, Quantity q = Quantity::Faces);

/// lambda^(-(d-1)/(d+1)) Var[N_{n,k}] at the largest lambda.
ConstantEstimate estimate_variance_ball(const ExperimentResult& result, int n, int k);

struct CltResult {
  double lambda = 0.0;
  int n = 0;
  int k = 0;
  int reps = 0;
  double ks = 0.0;
  double critical_5pct = 0.0;  // 1.36 / sqrt(reps)
};

CltResult clt_from_values(const std::vector<double>& values);
CltResult clt_diagnostic(const ExperimentResult& result, std::size_t block, int n, int k);
/// Runs a sweep at the single lambda and returns the KS distance of N_{n,k}.
CltResult clt_diagnostic(ExperimentPlan plan, double lambda, int n, int k);

struct LayerScaling {
  SlopeFit fit;
  double beta = 0.0;  // rescaled mean total layers at the largest lambda
  double beta_se = 0.0;
  double beta_previous = 0.0;  // same at the second largest lambda
  double beta_previous_se = 0.0;
};

LayerScaling layer_count_scaling(const ExperimentResult& full_peel_result);
LayerScaling layer_count_scaling(ExperimentPlan plan);

struct ProfilePoint {
  double t = 0.0;
  int layer = 0;
  double estimate = 0.0;
  double se = 0.0;
  double conjecture = 0.0;
};

/// lambda^(-(d-1)/(d+1)) N_{n,0} at n = max(1, floor(t lambda^(2/(d+1)))) against
/// ((d+1)/(2 beta)) (1 - t/beta)_+^((d-1)/2).
std::vector<ProfilePoint> layer_profile(double lambda, const std::vector<double>& t_grid, int replications,
                                        std::uint64_t seed, int d, double beta, int threads = 0);

struct MonotonicityRow {
  int n = 0;
  double value = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  /// Comparison with row n+1: "decreasing", "increasing" or "inconclusive"; empty on the last row.
  std::string flag;
};

std::vector<MonotonicityRow> monotonicity_table(const ExperimentResult& result, int k = 0);

/// Count of rescaled ball-model points in the box [v_lo, v_hi] x [h_lo, h_hi].
struct BoxCount {
  std::vector<double> v_lo, v_hi;
  double h_lo = 0.0, h_hi = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double expected = 0.0;  // integral of the rescaled density over the box
};

std::vector<BoxCount> rescaled_intensity_check(int d, double lambda, std::vector<BoxCount> boxes, int replications,
                                               std::uint64_t seed, int threads = 0);

}  // namespace onionlab
