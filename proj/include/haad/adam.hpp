#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "haad/errors.hpp"

namespace haad {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed list of parameter tensors.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(const std::vector<Eigen::MatrixXd*>& params, const std::vector<Eigen::MatrixXd>& grads,
            double lr) {
    if (params.size() != grads.size()) throw ArgumentError("Adam: parameter/gradient count mismatch");
    if (m_.empty()) {
      for (auto* p : params) {
        m_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
        v_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      }
    }
    if (m_.size() != params.size()) throw ArgumentError("Adam: parameter list changed between steps");
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, t_);
    const double c2 = 1.0 - std::pow(config_.beta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grads[i].cwiseProduct(grads[i]);
      auto denom = ((v_[i] / c2).array().sqrt() + config_.epsilon);
      params[i]->array() -= lr * (m_[i] / c1).array() / denom;
    }
  }

  long steps() const { return t_; }

 private:
  AdamConfig config_;
  std::vector<Eigen::MatrixXd> m_, v_;
  long t_ = 0;
};

}  // namespace haad
