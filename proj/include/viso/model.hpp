#pragma once

#include <string>
#include <vector>

namespace viso {

/// Dense row-major matrix; just enough surface for the power-control math.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

enum class Split { Train, Test, Stress, Shifted };

const char* split_name(Split s);
Split parse_split(const std::string& name);  // throws std::invalid_argument

/// Effective channel magnitudes g[l][k] >= 0 from AP l to UE k (linear scale).
struct ChannelGains {
  Mat g;
  void validate() const;
};

/// Per-AP transmit budgets, linear watts, strictly positive.
struct PowerBudget {
  std::vector<double> p_max;
  void validate() const;
};

/// Receiver noise power, linear watts, strictly positive.
struct NoisePower {
  double sigma2 = 0.0;
  void validate() const;
};

/// One downlink power-control problem.
struct Instance {
  std::string id;
  Split split = Split::Train;
  int L = 0;  // APs
  int K = 0;  // UEs
  ChannelGains gains;   // L x K
  PowerBudget budget;   // length L
  NoisePower noise;
  double gamma_target = 0.0;  // target common SE, bit/s/Hz

  void validate() const;  // throws std::invalid_argument on any broken invariant
};

/// Candidate power coefficients eta[l][k] >= 0 (linear watts). Feasibility
/// against the per-AP budgets is the verifier's job, not a type invariant.
struct PowerAllocation {
  Mat eta;
};

/// Per-UE spectral efficiency, bit/s/Hz.
struct RateVector {
  std::vector<double> se;
};

/// SINR_k = (sum_l sqrt(eta_lk) g_lk)^2 / (sigma2 + sum_{k'!=k} sum_l eta_lk' g_lk^2).
/// Coherent maximum-ratio numerator, non-coherent inter-user interference.
/// Throws std::invalid_argument on dimension mismatch or invalid eta entries.
std::vector<double> compute_sinr(const Instance& inst, const PowerAllocation& alloc);

/// SE_k = log2(1 + SINR_k).
RateVector compute_se(const Instance& inst, const PowerAllocation& alloc);

/// min_k SE_k; throws std::invalid_argument on an empty vector.
double min_rate(const RateVector& rates);

/// Row sums of eta, one entry per AP.
std::vector<double> per_ap_load(const PowerAllocation& alloc);

}  // namespace viso
