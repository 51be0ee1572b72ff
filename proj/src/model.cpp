#include "viso/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace viso {

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Test: return "test";
    case Split::Stress: return "stress";
    case Split::Shifted: return "shifted";
  }
  return "train";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "test") return Split::Test;
  if (name == "stress") return Split::Stress;
  if (name == "shifted") return Split::Shifted;
  throw std::invalid_argument("unknown split: " + name);
}

void ChannelGains::validate() const {
  if (g.rows < 1 || g.cols < 1) throw std::invalid_argument("gains: need L >= 1 and K >= 1");
  for (double v : g.data) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("gains: entries must be finite and >= 0");
  }
}

void PowerBudget::validate() const {
  if (p_max.empty()) throw std::invalid_argument("budget: empty");
  for (double v : p_max) {
    if (!std::isfinite(v) || v <= 0.0) throw std::invalid_argument("budget: entries must be finite and > 0");
  }
}

void NoisePower::validate() const {
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) throw std::invalid_argument("noise: sigma2 must be finite and > 0");
}

void Instance::validate() const {
  gains.validate();
  budget.validate();
  noise.validate();
  if (L != gains.g.rows || K != gains.g.cols)
    throw std::invalid_argument("instance " + id + ": gains dimensions do not match L, K");
  if (static_cast<int>(budget.p_max.size()) != L)
    throw std::invalid_argument("instance " + id + ": budget length does not match L");
  if (!std::isfinite(gamma_target) || gamma_target < 0.0)
    throw std::invalid_argument("instance " + id + ": gamma_target must be finite and >= 0");
}

namespace {

void check_alloc(const Instance& inst, const PowerAllocation& alloc) {
  if (alloc.eta.rows != inst.L || alloc.eta.cols != inst.K)
    throw std::invalid_argument("allocation dimensions do not match instance");
  for (double v : alloc.eta.data) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("allocation entries must be finite and >= 0");
  }
}

}  // namespace

std::vector<double> compute_sinr(const Instance& inst, const PowerAllocation& alloc) {
  check_alloc(inst, alloc);
  const Mat& g = inst.gains.g;
  const Mat& eta = alloc.eta;
  const int L = inst.L, K = inst.K;

  std::vector<double> ap_total(L, 0.0);
  for (int l = 0; l < L; ++l) {
    double t = 0.0;
    for (int k = 0; k < K; ++k) t += eta(l, k);
    ap_total[l] = t;
  }

  std::vector<double> out(K, 0.0);
  for (int k = 0; k < K; ++k) {
    double num = 0.0;
    double interf = 0.0;
    for (int l = 0; l < L; ++l) {
      const double glk = g(l, k);
      num += std::sqrt(eta(l, k)) * glk;
      // sum over k' != k of eta(l,k'); clamp guards rounding in the subtraction
      interf += std::max(ap_total[l] - eta(l, k), 0.0) * glk * glk;
    }
    out[k] = num * num / (inst.noise.sigma2 + interf);
  }
  return out;
}

RateVector compute_se(const Instance& inst, const PowerAllocation& alloc) {
  const auto sinr = compute_sinr(inst, alloc);
  RateVector r;
  r.se.reserve(sinr.size());
  for (double s : sinr) r.se.push_back(std::log1p(s) / std::numbers::ln2);
  return r;
}

double min_rate(const RateVector& rates) {
  if (rates.se.empty()) throw std::invalid_argument("min_rate: empty rate vector");
  return *std::min_element(rates.se.begin(), rates.se.end());
}

std::vector<double> per_ap_load(const PowerAllocation& alloc) {
  std::vector<double> load(alloc.eta.rows, 0.0);
  for (int l = 0; l < alloc.eta.rows; ++l) {
    double t = 0.0;
    for (int k = 0; k < alloc.eta.cols; ++k) t += alloc.eta(l, k);
    load[l] = t;
  }
  return load;
}

}  // namespace viso
