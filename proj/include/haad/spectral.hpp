#pragma once

#include <Eigen/Dense>

#include "haad/motion.hpp"

namespace haad {

// M x 3J truncated spectrum of a motion.
using DctCoefficients = Eigen::MatrixXd;

// Rows are the first M orthonormal DCT-II basis vectors over H points.
class DctBasis {
 public:
  DctBasis(int components, int frames);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int components() const { return static_cast<int>(matrix_.rows()); }
  int frames() const { return static_cast<int>(matrix_.cols()); }

 private:
  Eigen::MatrixXd matrix_;
};

inline DctBasis build_dct_basis(int components, int frames) { return DctBasis(components, frames); }

// C = T X.
DctCoefficients dct_encode(const DctBasis& basis, const MotionSequence& motion);
DctCoefficients dct_encode(const DctBasis& basis, const Eigen::MatrixXd& frames);

// X = T^T C; the least-squares reconstruction when M < H.
MotionSequence idct_decode(const DctBasis& basis, const DctCoefficients& coeffs, int joints);
Eigen::MatrixXd idct_frames(const DctBasis& basis, const DctCoefficients& coeffs);

}  // namespace haad
