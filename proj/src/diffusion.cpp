#include "haad/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "haad/adam.hpp"
#include "haad/errors.hpp"
#include "haad/random.hpp"

namespace haad {

NoiseSchedule::NoiseSchedule(Eigen::VectorXd alpha_bar) : alpha_bar_(std::move(alpha_bar)) {
  if (alpha_bar_.size() < 1) throw ArgumentError("noise schedule needs at least one step");
  for (Eigen::Index i = 0; i < alpha_bar_.size(); ++i) {
    const double a = alpha_bar_(i);
    if (!(a > 0.0 && a <= 1.0)) throw ArgumentError("noise schedule values must lie in (0, 1]");
    if (i > 0 && !(a < alpha_bar_(i - 1)))
      throw ArgumentError("noise schedule must be strictly decreasing");
  }
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t == 0) return 1.0;
  if (t < 0 || t > steps()) throw ArgumentError("timestep " + std::to_string(t) + " out of range");
  return alpha_bar_(t - 1);
}

NoiseSchedule build_cosine_schedule(int steps, double offset, double max_beta) {
  if (steps < 1) throw ArgumentError("cosine schedule needs at least one step");
  auto f = [&](double t) {
    const double c = std::cos((t / steps + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  Eigen::VectorXd ab(steps);
  double prev = 1.0;
  for (int t = 1; t <= steps; ++t) {
    const double beta = std::min(1.0 - f(t) / f(t - 1), max_beta);
    prev *= 1.0 - beta;
    ab(t - 1) = prev;
  }
  return NoiseSchedule(std::move(ab));
}

DctCoefficients forward_noise(const NoiseSchedule& schedule, const DctCoefficients& c0, int t,
                              const Eigen::MatrixXd& noise) {
  if (t < 1 || t > schedule.steps())
    throw ArgumentError("forward_noise: timestep " + std::to_string(t) + " outside [1, steps]");
  if (noise.rows() != c0.rows() || noise.cols() != c0.cols())
    throw ArgumentError("forward_noise: noise shape does not match the spectrum");
  const double ab = schedule.alpha_bar(t);
  return std::sqrt(ab) * c0 + std::sqrt(1.0 - ab) * noise;
}

CompletionMask::CompletionMask(int observed, int predicted) : observed_(observed), predicted_(predicted) {
  if (observed < 0 || predicted < 0 || observed + predicted < 1)
    throw ArgumentError("completion mask lengths must be non-negative with a positive total");
}

Eigen::VectorXd CompletionMask::values() const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(length());
  m.head(observed_).setOnes();
  return m;
}

DctCoefficients fuse_completion(const DctBasis& basis, const CompletionMask& mask,
                                const DctCoefficients& noisy_observed, const DctCoefficients& denoised) {
  if (mask.length() != basis.frames())
    throw ArgumentError("completion mask length does not match the basis frame count");
  const Eigen::MatrixXd& t = basis.matrix();
  const Eigen::Index o = mask.observed();
  const Eigen::Index p = mask.predicted();
  // T T^T = I for the orthonormal truncated basis.
  if (p == 0) return noisy_observed;
  if (o == 0) return denoised;
  // Only the observed frames of the noisy branch and the predicted frames of the denoised
  // branch survive the mask, so each branch is decoded on its own frame range.
  return t.leftCols(o) * (t.leftCols(o).transpose() * noisy_observed) +
         t.rightCols(p) * (t.rightCols(p).transpose() * denoised);
}

// ---- noise predictor ----

std::vector<Eigen::MatrixXd*> NoisePredictorParams::tensors() {
  std::vector<Eigen::MatrixXd*> out{&input_weight, &time_weight, &input_bias};
  for (std::size_t b = 0; b < inner_weight.size(); ++b) {
    out.push_back(&inner_weight[b]);
    out.push_back(&inner_bias[b]);
    out.push_back(&outer_weight[b]);
    out.push_back(&outer_bias[b]);
  }
  out.push_back(&output_weight);
  out.push_back(&output_bias);
  out.push_back(&skip);
  out.push_back(&gain);
  return out;
}

std::vector<const Eigen::MatrixXd*> NoisePredictorParams::tensors() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (auto* t : const_cast<NoisePredictorParams*>(this)->tensors()) out.push_back(t);
  return out;
}

std::vector<std::string> NoisePredictorParams::tensor_names() const {
  std::vector<std::string> out{"input_weight", "time_weight", "input_bias"};
  for (std::size_t b = 0; b < inner_weight.size(); ++b) {
    const auto s = std::to_string(b);
    out.insert(out.end(), {"inner_weight." + s, "inner_bias." + s, "outer_weight." + s, "outer_bias." + s});
  }
  out.push_back("output_weight");
  out.push_back("output_bias");
  out.push_back("skip");
  out.push_back("gain");
  return out;
}

NoisePredictorParams NoisePredictorParams::zeros_like() const {
  NoisePredictorParams z = *this;
  for (auto* t : z.tensors()) t->setZero();
  return z;
}

NoisePredictorParams init_noise_predictor(const NoisePredictorConfig& c, std::uint64_t seed) {
  if (c.dct_components < 1 || c.joints < 1 || c.hidden < 1 || c.blocks < 0 || c.steps < 1)
    throw ArgumentError("invalid noise predictor config");
  if (c.time_dim < 2 || c.time_dim % 2 != 0)
    throw ArgumentError("timestep embedding dimension must be a positive even number");
  Rng rng(seed);
  const int d = c.dct_components * 3 * c.joints;
  NoisePredictorParams p;
  p.config = c;
  p.input_weight = uniform(c.hidden, d, std::sqrt(3.0 / d), rng);
  p.time_weight = uniform(c.hidden, c.time_dim, std::sqrt(3.0 / c.time_dim), rng);
  p.input_bias = Eigen::MatrixXd::Zero(c.hidden, 1);
  for (int b = 0; b < c.blocks; ++b) {
    p.inner_weight.push_back(uniform(c.hidden, c.hidden, std::sqrt(3.0 / c.hidden), rng));
    p.inner_bias.push_back(Eigen::MatrixXd::Zero(c.hidden, 1));
    p.outer_weight.push_back(uniform(c.hidden, c.hidden, std::sqrt(3.0 / c.hidden), rng));
    p.outer_bias.push_back(Eigen::MatrixXd::Zero(c.hidden, 1));
  }
  p.output_weight = Eigen::MatrixXd::Zero(d, c.hidden);
  p.output_bias = Eigen::MatrixXd::Zero(d, 1);
  // Skip and gain start so that the network output is a clean-spectrum estimate under the
  // default schedule: eps = (x - sqrt(ab) x0) / sqrt(1 - ab).
  const auto schedule = build_cosine_schedule(c.steps);
  p.skip.resize(c.steps, 1);
  p.gain.resize(c.steps, 1);
  for (int t = 1; t <= c.steps; ++t) {
    const double ab = schedule.alpha_bar(t);
    p.skip(t - 1, 0) = 1.0 / std::sqrt(1.0 - ab);
    p.gain(t - 1, 0) = -std::sqrt(ab) / std::sqrt(1.0 - ab);
  }
  return p;
}

Eigen::VectorXd timestep_embedding(int t, int dim) {
  const int half = dim / 2;
  Eigen::VectorXd e(dim);
  for (int i = 0; i < half; ++i) {
    const double w = std::exp(-std::log(10000.0) * i / half);
    e(i) = std::sin(t * w);
    e(half + i) = std::cos(t * w);
  }
  return e;
}

namespace {

Eigen::ArrayXXd sigmoid(const Eigen::MatrixXd& x) { return 1.0 / (1.0 + (-x.array()).exp()); }

struct PredictorTrace {
  Eigen::MatrixXd emb;
  std::vector<Eigen::MatrixXd> hidden;  // blocks + 1 entries
  std::vector<Eigen::MatrixXd> pre;     // per block, W1 h + b1
  std::vector<Eigen::MatrixXd> act;     // per block, silu(pre)
  Eigen::MatrixXd raw;  // W_out h + b_out before the per-step gain
  Eigen::MatrixXd out;
};

PredictorTrace run_predictor(const NoisePredictorParams& p, const Eigen::MatrixXd& x,
                             const std::vector<int>& timesteps) {
  const auto& c = p.config;
  const int d = c.dct_components * 3 * c.joints;
  if (x.rows() != d) throw ArgumentError("noise predictor input has the wrong dimension");
  if (static_cast<Eigen::Index>(timesteps.size()) != x.cols())
    throw ArgumentError("noise predictor needs one timestep per column");
  PredictorTrace tr;
  tr.emb.resize(c.time_dim, x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (timesteps[i] < 1 || timesteps[i] > c.steps) throw ArgumentError("noise predictor timestep out of range");
    tr.emb.col(i) = timestep_embedding(timesteps[i], c.time_dim);
  }
  Eigen::MatrixXd h = p.input_weight * x + p.time_weight * tr.emb;
  h.colwise() += p.input_bias.col(0);
  tr.hidden.push_back(h);
  for (int b = 0; b < c.blocks; ++b) {
    Eigen::MatrixXd pre = p.inner_weight[b] * h;
    pre.colwise() += p.inner_bias[b].col(0);
    Eigen::MatrixXd act = (pre.array() * sigmoid(pre)).matrix();
    h += p.outer_weight[b] * act;
    h.colwise() += p.outer_bias[b].col(0);
    tr.pre.push_back(std::move(pre));
    tr.act.push_back(std::move(act));
    tr.hidden.push_back(h);
  }
  tr.raw = p.output_weight * h;
  tr.raw.colwise() += p.output_bias.col(0);
  tr.out.resize(tr.raw.rows(), tr.raw.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    tr.out.col(i) = p.skip(timesteps[i] - 1, 0) * x.col(i) + p.gain(timesteps[i] - 1, 0) * tr.raw.col(i);
  return tr;
}

}  // namespace

Eigen::MatrixXd predict_noise(const NoisePredictorParams& params, const Eigen::MatrixXd& spectra,
                              const std::vector<int>& timesteps) {
  return run_predictor(params, spectra, timesteps).out;
}

double noise_loss_and_gradient(const NoisePredictorParams& p, const Eigen::MatrixXd& spectra,
                               const std::vector<int>& timesteps, const Eigen::MatrixXd& target,
                               NoisePredictorParams* grad) {
  const PredictorTrace tr = run_predictor(p, spectra, timesteps);
  if (target.rows() != tr.out.rows() || target.cols() != tr.out.cols())
    throw ArgumentError("noise target shape does not match the prediction");
  const double n = static_cast<double>(spectra.cols());
  const Eigen::MatrixXd diff = tr.out - target;
  const double loss = diff.squaredNorm() / n;
  if (!grad) return loss;

  *grad = p.zeros_like();
  const Eigen::MatrixXd d_eps = (2.0 / n) * diff;
  Eigen::MatrixXd d_out(d_eps.rows(), d_eps.cols());
  for (Eigen::Index i = 0; i < spectra.cols(); ++i) {
    const int k = timesteps[i] - 1;
    grad->skip(k, 0) += d_eps.col(i).dot(spectra.col(i));
    grad->gain(k, 0) += d_eps.col(i).dot(tr.raw.col(i));
    d_out.col(i) = p.gain(k, 0) * d_eps.col(i);
  }
  grad->output_weight = d_out * tr.hidden.back().transpose();
  grad->output_bias = d_out.rowwise().sum();
  Eigen::MatrixXd d_h = p.output_weight.transpose() * d_out;
  for (int b = p.config.blocks - 1; b >= 0; --b) {
    grad->outer_weight[b] = d_h * tr.act[b].transpose();
    grad->outer_bias[b] = d_h.rowwise().sum();
    const Eigen::MatrixXd d_act = p.outer_weight[b].transpose() * d_h;
    const Eigen::ArrayXXd s = sigmoid(tr.pre[b]);
    const Eigen::MatrixXd d_pre = (d_act.array() * s * (1.0 + tr.pre[b].array() * (1.0 - s))).matrix();
    grad->inner_weight[b] = d_pre * tr.hidden[b].transpose();
    grad->inner_bias[b] = d_pre.rowwise().sum();
    d_h += p.inner_weight[b].transpose() * d_pre;
  }
  grad->input_weight = d_h * spectra.transpose();
  grad->time_weight = d_h * tr.emb.transpose();
  grad->input_bias = d_h.rowwise().sum();
  return loss;
}

void DiffusionModel::validate() const {
  if (predictor.config.steps != schedule.steps()) {
    throw ArgumentError("diffusion predictor was built for " + std::to_string(predictor.config.steps) +
                        " steps but the schedule has " + std::to_string(schedule.steps()));
  }
  if (dct_components() > frames) throw ArgumentError("diffusion DCT components exceed the frame count");
  if (!(scale > 0.0)) throw ArgumentError("diffusion spectrum scale must be positive");
  if (x0_bound.size() != 0 &&
      (x0_bound.rows() != dct_components() || x0_bound.cols() != 3 * joints() || (x0_bound.array() < 0.0).any()))
    throw ArgumentError("diffusion clipping bound must be a non-negative M x 3J matrix");
}

// ---- training ----

namespace {

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

struct NoisedBatch {
  Eigen::MatrixXd input;
  Eigen::MatrixXd target;
  std::vector<int> timesteps;
};

NoisedBatch make_batch(const std::vector<Eigen::VectorXd>& spectra, const std::vector<std::size_t>& pick,
                       const NoiseSchedule& schedule, Rng& rng) {
  const auto d = spectra.front().size();
  NoisedBatch b;
  b.input.resize(d, static_cast<Eigen::Index>(pick.size()));
  b.target.resize(d, static_cast<Eigen::Index>(pick.size()));
  std::uniform_int_distribution<int> step(1, schedule.steps());
  for (std::size_t i = 0; i < pick.size(); ++i) {
    const int t = step(rng);
    const Eigen::VectorXd eps = standard_normal(d, 1, rng);
    const double ab = schedule.alpha_bar(t);
    const auto col = static_cast<Eigen::Index>(i);
    b.input.col(col) = std::sqrt(ab) * spectra[pick[i]] + std::sqrt(1.0 - ab) * eps;
    b.target.col(col) = eps;
    b.timesteps.push_back(t);
  }
  return b;
}

// Splits the batch into contiguous column chunks and sums the chunk gradients in order.
double batch_gradient(const NoisePredictorParams& p, const NoisedBatch& b, int threads,
                      NoisePredictorParams* grad) {
  const Eigen::Index n = b.input.cols();
  const int chunks = std::clamp<int>(threads, 1, static_cast<int>(n));
  if (chunks == 1) return noise_loss_and_gradient(p, b.input, b.timesteps, b.target, grad);

  std::vector<NoisePredictorParams> grads(static_cast<std::size_t>(chunks));
  std::vector<double> losses(static_cast<std::size_t>(chunks));
  std::vector<Eigen::Index> bounds;
  for (int c = 0; c <= chunks; ++c) bounds.push_back(n * c / chunks);
  std::vector<std::jthread> workers;
  for (int c = 0; c < chunks; ++c) {
    workers.emplace_back([&, c] {
      const Eigen::Index lo = bounds[c], len = bounds[c + 1] - lo;
      std::vector<int> ts(b.timesteps.begin() + lo, b.timesteps.begin() + lo + len);
      losses[c] = noise_loss_and_gradient(p, b.input.middleCols(lo, len), ts, b.target.middleCols(lo, len),
                                          &grads[c]);
    });
  }
  workers.clear();
  *grad = p.zeros_like();
  double loss = 0.0;
  auto total = grad->tensors();
  for (int c = 0; c < chunks; ++c) {
    const double w = static_cast<double>(bounds[c + 1] - bounds[c]) / static_cast<double>(n);
    loss += w * losses[c];
    auto part = grads[c].tensors();
    for (std::size_t k = 0; k < total.size(); ++k) *total[k] += w * *part[k];
  }
  return loss;
}

}  // namespace

DiffusionTrainResult train_diffusion(const std::vector<MotionSequence>& corpus,
                                     const DiffusionTrainConfig& cfg) {
  if (corpus.empty()) throw ConfigError("diffusion training corpus is empty");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.lr > 0.0))
    throw ConfigError("diffusion training needs epochs >= 1, batch_size >= 1 and lr > 0");
  const int frames = corpus.front().frame_count();
  const int joints = corpus.front().joint_count();
  for (const auto& m : corpus)
    if (m.frame_count() != frames || m.joint_count() != joints)
      throw ConfigError("diffusion training corpus mixes sequence shapes");

  const DctBasis basis(cfg.dct_components, frames);
  DiffusionModel model;
  model.frames = frames;
  model.schedule = build_cosine_schedule(cfg.steps);
  model.predictor = init_noise_predictor(
      {cfg.dct_components, joints, cfg.hidden, cfg.blocks, cfg.time_dim, cfg.steps}, derive_seed(cfg.seed, {0}));

  std::vector<Eigen::MatrixXd> raw;
  double energy = 0.0;
  for (const auto& m : corpus) {
    raw.push_back(dct_encode(basis, m));
    energy += raw.back().squaredNorm();
  }
  model.scale = std::sqrt(energy / (static_cast<double>(corpus.size()) * raw.front().size()));
  if (!(model.scale > 0.0)) model.scale = 1.0;
  std::vector<Eigen::VectorXd> spectra;
  model.x0_bound = DctCoefficients::Zero(raw.front().rows(), raw.front().cols());
  for (const auto& c : raw) {
    spectra.push_back(flatten(c / model.scale));
    model.x0_bound = model.x0_bound.cwiseMax((c / model.scale).cwiseAbs());
  }

  Rng val_rng(derive_seed(cfg.seed, {1}));
  std::vector<std::size_t> val_pick;
  std::uniform_int_distribution<std::size_t> any(0, spectra.size() - 1);
  for (int i = 0; i < cfg.validation_size; ++i) val_pick.push_back(any(val_rng));
  const NoisedBatch validation = make_batch(spectra, val_pick, model.schedule, val_rng);

  DiffusionTrainResult result;
  result.initial_validation_loss =
      noise_loss_and_gradient(model.predictor, validation.input, validation.timesteps, validation.target, nullptr);

  Adam adam;
  std::vector<std::size_t> order(spectra.size());
  NoisePredictorParams grad;
  for (int e = 0; e < cfg.epochs; ++e) {
    Rng rng(derive_seed(cfg.seed, {2, static_cast<std::uint64_t>(e)}));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::size_t> pick(order.begin() + static_cast<long>(lo), order.begin() + static_cast<long>(hi));
      const NoisedBatch batch = make_batch(spectra, pick, model.schedule, rng);
      const double loss = batch_gradient(model.predictor, batch, cfg.threads, &grad);
      if (!std::isfinite(loss))
        throw DivergenceError("diffusion training diverged at epoch " + std::to_string(e + 1));
      sum += loss * static_cast<double>(hi - lo);
      std::vector<Eigen::MatrixXd> g;
      for (auto* t : grad.tensors()) g.push_back(*t);
      adam.step(model.predictor.tensors(), g, cfg.lr);
    }
    result.epoch_loss.push_back(sum / static_cast<double>(order.size()));
  }
  result.final_validation_loss =
      noise_loss_and_gradient(model.predictor, validation.input, validation.timesteps, validation.target, nullptr);
  result.model = std::move(model);
  return result;
}

// ---- sampling ----

std::vector<MotionSequence> ddim_sample_with_completion(const DiffusionModel& model,
                                                        const MotionSequence& observed,
                                                        const CompletionMask& mask, int n_g,
                                                        std::uint64_t seed,
                                                        const SamplerObserver& observer) {
  model.validate();
  if (n_g < 0) throw ArgumentError("number of generations must be non-negative");
  if (observed.frame_count() != model.frames || observed.joint_count() != model.joints()) {
    throw ArgumentError("observed motion is " + std::to_string(observed.frame_count()) + "x" +
                        std::to_string(observed.joint_count()) + " joints, diffusion model expects " +
                        std::to_string(model.frames) + "x" + std::to_string(model.joints()));
  }
  if (mask.length() != model.frames) throw ArgumentError("completion mask length does not match the motion");
  if (n_g == 0) return {};

  const DctBasis basis(model.dct_components(), model.frames);
  const Eigen::Index m = basis.components();
  const Eigen::Index w = 3 * model.joints();
  const DctCoefficients c_obs = dct_encode(basis, observed) / model.scale;
  const auto& sched = model.schedule;

  std::vector<Rng> rngs;
  std::vector<DctCoefficients> current;
  for (int i = 0; i < n_g; ++i) {
    rngs.emplace_back(seed + static_cast<std::uint64_t>(i));
    current.push_back(standard_normal(m, w, rngs.back()));
  }

  Eigen::MatrixXd batch(m * w, n_g);
  for (int t = sched.steps(); t >= 1; --t) {
    for (int i = 0; i < n_g; ++i) batch.col(i) = flatten(current[i]);
    const Eigen::MatrixXd eps = predict_noise(model.predictor, batch, std::vector<int>(n_g, t));
    const double ab = sched.alpha_bar(t);
    const double ab_prev = sched.alpha_bar(t - 1);
    for (int i = 0; i < n_g; ++i) {
      DctCoefficients eps_i = unflatten(eps.col(i), m, w);
      DctCoefficients x0 = (current[i] - std::sqrt(1.0 - ab) * eps_i) / std::sqrt(ab);
      if (model.x0_bound.size() != 0) {
        // Clip the clean estimate and keep the noise estimate consistent with it.
        x0 = x0.cwiseMin(model.x0_bound).cwiseMax(-model.x0_bound);
        eps_i = (current[i] - std::sqrt(ab) * x0) / std::sqrt(1.0 - ab);
      }
      const DctCoefficients denoised = std::sqrt(ab_prev) * x0 + std::sqrt(1.0 - ab_prev) * eps_i;
      const Eigen::MatrixXd fresh = standard_normal(m, w, rngs[i]);
      const DctCoefficients noisy = std::sqrt(ab_prev) * c_obs + std::sqrt(1.0 - ab_prev) * fresh;
      current[i] = fuse_completion(basis, mask, noisy, denoised);
      if (observer) observer(i, t, noisy, denoised, current[i]);
    }
  }

  std::vector<MotionSequence> out;
  for (int i = 0; i < n_g; ++i) out.push_back(idct_decode(basis, current[i] * model.scale, model.joints()));
  return out;
}

// ---- checkpoint ----

Checkpoint diffusion_to_checkpoint(const DiffusionModel& model, const nlohmann::json& extra) {
  model.validate();
  const auto& c = model.predictor.config;
  Checkpoint ck;
  ck.header = extra.is_object() ? extra : nlohmann::json::object();
  ck.header["kind"] = "diffusion";
  ck.header["steps"] = c.steps;
  ck.header["dct_components"] = c.dct_components;
  ck.header["joints"] = c.joints;
  ck.header["frames"] = model.frames;
  ck.header["scale"] = model.scale;
  ck.header["predictor"] = {{"hidden", c.hidden}, {"blocks", c.blocks}, {"time_dim", c.time_dim}};
  ck.header["schedule"] = {{"kind", "cosine"}, {"offset", 0.008}, {"max_beta", 0.999}};
  const auto names = model.predictor.tensor_names();
  const auto tensors = model.predictor.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) ck.tensors.push_back({names[i], *tensors[i]});
  if (model.x0_bound.size() != 0) ck.tensors.push_back({"x0_bound", model.x0_bound});
  return ck;
}

DiffusionModel diffusion_from_checkpoint(const Checkpoint& ck) {
  const auto& h = ck.header;
  if (h.value("kind", "") != "diffusion") throw CompatibilityError("checkpoint is not a diffusion checkpoint");
  NoisePredictorConfig c;
  c.steps = h.at("steps").get<int>();
  c.dct_components = h.at("dct_components").get<int>();
  c.joints = h.at("joints").get<int>();
  c.hidden = h.at("predictor").at("hidden").get<int>();
  c.blocks = h.at("predictor").at("blocks").get<int>();
  c.time_dim = h.at("predictor").at("time_dim").get<int>();
  DiffusionModel model;
  model.frames = h.at("frames").get<int>();
  model.scale = h.at("scale").get<double>();
  const auto& s = h.at("schedule");
  if (s.value("kind", "") != "cosine") throw CompatibilityError("unsupported noise schedule kind");
  model.schedule = build_cosine_schedule(c.steps, s.value("offset", 0.008), s.value("max_beta", 0.999));
  model.predictor = init_noise_predictor(c, 0);
  const auto names = model.predictor.tensor_names();
  auto tensors = model.predictor.tensors();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& stored = ck.tensor(names[i]);
    if (stored.rows() != tensors[i]->rows() || stored.cols() != tensors[i]->cols())
      throw CompatibilityError("diffusion tensor '" + names[i] + "' has the wrong shape");
    *tensors[i] = stored;
  }
  if (ck.has_tensor("x0_bound")) model.x0_bound = ck.tensor("x0_bound");
  model.validate();
  return model;
}

}  // namespace haad
