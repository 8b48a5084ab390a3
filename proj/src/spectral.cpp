#include "haad/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "haad/errors.hpp"

namespace haad {

DctBasis::DctBasis(int components, int frames) {
  if (frames < 1 || components < 1 || components > frames) {
    throw ArgumentError("DCT basis needs 1 <= components <= frames, got components=" +
                        std::to_string(components) + " frames=" + std::to_string(frames));
  }
  matrix_.resize(components, frames);
  const double h = frames;
  for (int k = 0; k < components; ++k) {
    const double norm = k == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
    for (int n = 0; n < frames; ++n)
      matrix_(k, n) = norm * std::cos(std::numbers::pi * (n + 0.5) * k / h);
  }
}

DctCoefficients dct_encode(const DctBasis& basis, const Eigen::MatrixXd& frames) {
  if (frames.rows() != basis.frames()) {
    throw ArgumentError("dct_encode: motion has " + std::to_string(frames.rows()) +
                        " frames, basis expects " + std::to_string(basis.frames()));
  }
  return basis.matrix() * frames;
}

DctCoefficients dct_encode(const DctBasis& basis, const MotionSequence& motion) {
  return dct_encode(basis, motion.frames());
}

Eigen::MatrixXd idct_frames(const DctBasis& basis, const DctCoefficients& coeffs) {
  if (coeffs.rows() != basis.components()) {
    throw ArgumentError("idct_decode: spectrum has " + std::to_string(coeffs.rows()) +
                        " components, basis has " + std::to_string(basis.components()));
  }
  return basis.matrix().transpose() * coeffs;
}

MotionSequence idct_decode(const DctBasis& basis, const DctCoefficients& coeffs, int joints) {
  if (coeffs.cols() != 3 * joints)
    throw ArgumentError("idct_decode: spectrum width does not match 3*joints");
  return MotionSequence(idct_frames(basis, coeffs), joints);
}

}  // namespace haad
