#include "haad/encoder.hpp"

#include <cmath>

#include "haad/errors.hpp"
#include "haad/random.hpp"

namespace haad {

void EncoderConfig::validate() const {
  if (blocks < 1) throw ArgumentError("encoder needs at least one residual block");
  if (layers_per_block < 1) throw ArgumentError("encoder blocks need at least one layer");
  if (hidden_dim < 1) throw ArgumentError("encoder hidden dimension must be positive");
  if (joints < 1) throw ArgumentError("encoder joint count must be positive");
  if (dct_components < 1) throw ArgumentError("encoder DCT component count must be positive");
}

std::vector<Eigen::MatrixXd*> EncoderParams::tensors() {
  std::vector<Eigen::MatrixXd*> out{&input_weight};
  for (std::size_t l = 0; l < adjacency.size(); ++l) {
    out.push_back(&adjacency[l]);
    out.push_back(&weight[l]);
  }
  out.push_back(&output_weight);
  return out;
}

std::vector<const Eigen::MatrixXd*> EncoderParams::tensors() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (auto* t : const_cast<EncoderParams*>(this)->tensors()) out.push_back(t);
  return out;
}

std::vector<std::string> EncoderParams::tensor_names() const {
  std::vector<std::string> out{"input_weight"};
  for (std::size_t l = 0; l < adjacency.size(); ++l) {
    out.push_back("adjacency." + std::to_string(l));
    out.push_back("weight." + std::to_string(l));
  }
  out.push_back("output_weight");
  return out;
}

EncoderParams EncoderParams::zeros_like() const {
  EncoderParams z = *this;
  for (auto* t : z.tensors()) t->setZero();
  return z;
}

EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const int f = config.hidden_dim;
  const int j = config.joints;
  const int in = 3 * config.dct_components;
  EncoderParams p;
  p.config = config;
  p.seed = seed;
  p.input_weight = uniform(in, f, std::sqrt(3.0 / in), rng);
  for (int l = 0; l < config.layer_count(); ++l) {
    p.adjacency.push_back(Eigen::MatrixXd::Identity(j, j) + uniform(j, j, 1e-2, rng));
    p.weight.push_back(uniform(f, f, std::sqrt(3.0 / f), rng));
  }
  p.output_weight = uniform(f, f, std::sqrt(3.0 / f), rng);
  return p;
}

Eigen::MatrixXd to_node_features(const DctCoefficients& coeffs, int joints) {
  if (coeffs.cols() != 3 * joints) throw ArgumentError("spectrum width does not match 3*joints");
  const Eigen::Index m = coeffs.rows();
  Eigen::MatrixXd x(joints, 3 * m);
  for (int j = 0; j < joints; ++j)
    for (Eigen::Index k = 0; k < m; ++k)
      for (int a = 0; a < 3; ++a) x(j, 3 * k + a) = coeffs(k, 3 * j + a);
  return x;
}

DctCoefficients from_node_features(const Eigen::MatrixXd& features, int components) {
  if (features.cols() != 3 * components) throw ArgumentError("node feature width does not match 3*M");
  const Eigen::Index joints = features.rows();
  DctCoefficients c(components, 3 * joints);
  for (Eigen::Index j = 0; j < joints; ++j)
    for (int k = 0; k < components; ++k)
      for (int a = 0; a < 3; ++a) c(k, 3 * j + a) = features(j, 3 * k + a);
  return c;
}

namespace {

void check_shapes(const EncoderParams& p, const DctCoefficients& coeffs) {
  const auto& c = p.config;
  if (coeffs.rows() != c.dct_components || coeffs.cols() != 3 * c.joints) {
    throw ArgumentError("encoder expects a " + std::to_string(c.dct_components) + "x" +
                        std::to_string(3 * c.joints) + " spectrum, got " + std::to_string(coeffs.rows()) +
                        "x" + std::to_string(coeffs.cols()));
  }
  if (p.input_weight.rows() != 3 * c.dct_components || p.input_weight.cols() != c.hidden_dim ||
      static_cast<int>(p.adjacency.size()) != c.layer_count() ||
      static_cast<int>(p.weight.size()) != c.layer_count() || p.output_weight.rows() != c.hidden_dim ||
      p.output_weight.cols() != c.hidden_dim) {
    throw ArgumentError("encoder parameters are inconsistent with their config");
  }
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& x) {
  return a == Activation::kTanh ? Eigen::MatrixXd(x.array().tanh()) : x;
}

// d act / d pre, expressed through the activation output.
Eigen::MatrixXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
  if (a == Activation::kTanh) return (1.0 - out.array().square()).matrix();
  return Eigen::MatrixXd::Ones(out.rows(), out.cols());
}

struct Trace {
  Eigen::MatrixXd x;                   // J x 3M
  std::vector<Eigen::MatrixXd> input;  // per layer: H fed into the layer
  std::vector<Eigen::MatrixXd> out;    // per layer: act(A H W)
  Eigen::MatrixXd last_hidden;         // after the final block
  Eigen::MatrixXd pooled_source;       // last_hidden * W_out
  std::vector<Eigen::Index> argmax;    // per joint
};

Trace run_forward(const EncoderParams& p, const DctCoefficients& coeffs) {
  check_shapes(p, coeffs);
  const auto& c = p.config;
  Trace t;
  t.x = to_node_features(coeffs, c.joints);
  Eigen::MatrixXd h = t.x * p.input_weight;
  int l = 0;
  for (int b = 0; b < c.blocks; ++b) {
    Eigen::MatrixXd y = h;
    for (int k = 0; k < c.layers_per_block; ++k, ++l) {
      t.input.push_back(y);
      y = activate(c.activation, p.adjacency[l] * y * p.weight[l]);
      t.out.push_back(y);
    }
    h += y;
  }
  t.last_hidden = h;
  t.pooled_source = h * p.output_weight;
  t.argmax.resize(c.joints);
  for (int j = 0; j < c.joints; ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index f = 1; f < t.pooled_source.cols(); ++f)
      if (t.pooled_source(j, f) > t.pooled_source(j, best)) best = f;
    t.argmax[j] = best;
  }
  return t;
}

}  // namespace

Embedding forward(const EncoderParams& params, const DctCoefficients& coeffs) {
  const Trace t = run_forward(params, coeffs);
  Embedding z(params.config.joints);
  for (int j = 0; j < params.config.joints; ++j) z(j) = t.pooled_source(j, t.argmax[j]);
  return z;
}

std::vector<Eigen::Index> pooling_indices(const EncoderParams& params, const DctCoefficients& coeffs) {
  return run_forward(params, coeffs).argmax;
}

EncoderGradients backward(const EncoderParams& params, const DctCoefficients& coeffs,
                          const Eigen::VectorXd& grad_z) {
  const auto& c = params.config;
  if (grad_z.size() != c.joints) throw ArgumentError("grad_z length must equal the joint count");
  const Trace t = run_forward(params, coeffs);
  EncoderGradients g{params.zeros_like(), {}};

  Eigen::MatrixXd d_pool = Eigen::MatrixXd::Zero(c.joints, c.hidden_dim);
  for (int j = 0; j < c.joints; ++j) d_pool(j, t.argmax[j]) = grad_z(j);
  g.params.output_weight = t.last_hidden.transpose() * d_pool;
  Eigen::MatrixXd d_h = d_pool * params.output_weight.transpose();

  for (int b = c.blocks - 1; b >= 0; --b) {
    // h_out = h_in + y_last, so d_h flows both straight through and into the block.
    Eigen::MatrixXd d_y = d_h;
    for (int k = c.layers_per_block - 1; k >= 0; --k) {
      const int l = b * c.layers_per_block + k;
      const Eigen::MatrixXd d_pre = d_y.cwiseProduct(activation_slope(c.activation, t.out[l]));
      const Eigen::MatrixXd hw = t.input[l] * params.weight[l];
      g.params.adjacency[l] = d_pre * hw.transpose();
      g.params.weight[l] = (params.adjacency[l] * t.input[l]).transpose() * d_pre;
      d_y = params.adjacency[l].transpose() * d_pre * params.weight[l].transpose();
    }
    d_h += d_y;
  }
  g.params.input_weight = t.x.transpose() * d_h;
  g.input = from_node_features(d_h * params.input_weight.transpose(), c.dct_components);
  return g;
}

Embedding encode_motion(const EncoderParams& params, const DctBasis& basis,
                        const MotionSequence& motion) {
  return forward(params, dct_encode(basis, motion));
}

nlohmann::json encoder_config_to_json(const EncoderConfig& c) {
  return {{"blocks", c.blocks},
          {"layers_per_block", c.layers_per_block},
          {"hidden_dim", c.hidden_dim},
          {"joints", c.joints},
          {"dct_components", c.dct_components},
          {"activation", c.activation == Activation::kTanh ? "tanh" : "identity"}};
}

EncoderConfig encoder_config_from_json(const nlohmann::json& node) {
  EncoderConfig c;
  c.blocks = node.at("blocks").get<int>();
  c.layers_per_block = node.at("layers_per_block").get<int>();
  c.hidden_dim = node.at("hidden_dim").get<int>();
  c.joints = node.at("joints").get<int>();
  c.dct_components = node.at("dct_components").get<int>();
  const auto act = node.at("activation").get<std::string>();
  if (act == "tanh") {
    c.activation = Activation::kTanh;
  } else if (act == "identity") {
    c.activation = Activation::kIdentity;
  } else {
    throw ParseError("unknown encoder activation '" + act + "'");
  }
  c.validate();
  return c;
}

Checkpoint encoder_to_checkpoint(const EncoderParams& params, const nlohmann::json& extra) {
  Checkpoint ck;
  ck.header = extra.is_object() ? extra : nlohmann::json::object();
  ck.header["kind"] = "encoder";
  ck.header["config"] = encoder_config_to_json(params.config);
  ck.header["seed"] = params.seed;
  const auto names = params.tensor_names();
  const auto tensors = params.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) ck.tensors.push_back({names[i], *tensors[i]});
  return ck;
}

EncoderParams encoder_from_checkpoint(const Checkpoint& ck) {
  if (ck.header.value("kind", "") != "encoder")
    throw CompatibilityError("checkpoint is not an encoder checkpoint");
  EncoderParams p = init_params(encoder_config_from_json(ck.header.at("config")), 0);
  p.seed = ck.header.value("seed", std::uint64_t{0});
  const auto names = p.tensor_names();
  auto tensors = p.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& stored = ck.tensor(names[i]);
    if (stored.rows() != tensors[i]->rows() || stored.cols() != tensors[i]->cols())
      throw CompatibilityError("encoder tensor '" + names[i] + "' has the wrong shape");
    *tensors[i] = stored;
  }
  return p;
}

}  // namespace haad
