#pragma once

#include <cmath>
#include <string>

#include "sgsum/error.hpp"
#include "sgsum/params.hpp"

namespace sgsum {

struct AdamConfig {
  double lr = 0.03;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline double global_norm(const Gradients& grads) {
  double s = 0.0;
  for (const auto& [name, g] : grads) {
    for (double v : g.data()) s += v * v;
  }
  return std::sqrt(s);
}

// Rescales every gradient by max_norm / norm when the joint L2 norm exceeds
// max_norm. Returns the norm measured before clipping.
inline double clip_global_norm(Gradients& grads, double max_norm) {
  SGSUM_CHECK(max_norm > 0.0, "clip_global_norm: max_norm must be positive, got ", max_norm);
  const double norm = global_norm(grads);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& [name, g] : grads) {
      for (double& v : g.data()) v *= factor;
    }
  }
  return norm;
}

// One bias-corrected adaptive-moments update. Parameters without an entry in
// `grads` are treated as having zero gradient.
inline void adam_step(ParamStore& store, const Gradients& grads, const AdamConfig& cfg) {
  store.increment_step();
  const double t = static_cast<double>(store.step());
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [name, param] : store.params()) {
    Tensor& m = store.first_moment().at(name);
    Tensor& v = store.second_moment().at(name);
    auto it = grads.find(name);
    if (it != grads.end()) {
      SGSUM_CHECK(it->second.size() == param.size(), "adam_step: gradient for '", name,
                  "' has shape ", it->second.shape_str(), ", parameter has ", param.shape_str());
    }
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double g = it != grads.end() ? it->second[i] : 0.0;
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      param[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

}  // namespace sgsum
