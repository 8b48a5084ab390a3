// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if
// any of them fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "haad/augment.hpp"
#include "haad/diffusion.hpp"
#include "haad/encoder.hpp"
#include "haad/inference.hpp"
#include "haad/motion.hpp"
#include "haad/random.hpp"
#include "haad/spectral.hpp"
#include "haad/trainer.hpp"

using namespace haad;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

// ---- 1: DCT ----

Outcome dct_suite() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(101);
  double ortho = 0.0, round_trip = 0.0, band = 0.0, idem = 0.0;
  for (int h : {1, 2, 7, 30, 60, 97}) {
    const DctBasis full(h, h);
    const Eigen::MatrixXd& t = full.matrix();
    // Orthonormality against the closed-form basis.
    for (int k = 0; k < h; ++k)
      for (int n = 0; n < h; ++n) {
        const double scale = k == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
        const double expected = scale * std::cos(std::numbers::pi * (n + 0.5) * k / h);
        ortho = std::max(ortho, std::fabs(t(k, n) - expected));
      }
    ortho = std::max(ortho, (t * t.transpose() - Eigen::MatrixXd::Identity(h, h)).cwiseAbs().maxCoeff());

    const Eigen::MatrixXd x = standard_normal(h, 9, rng);
    round_trip = std::max(round_trip, (idct_frames(full, dct_encode(full, x)) - x).cwiseAbs().maxCoeff());

    for (int m = 1; m <= h; m += std::max(1, h / 4)) {
      const DctBasis basis(m, h);
      const Eigen::MatrixXd c = standard_normal(m, 9, rng);
      const Eigen::MatrixXd limited = idct_frames(basis, c);
      band = std::max(band, (dct_encode(basis, limited) - c).cwiseAbs().maxCoeff());
      const Eigen::MatrixXd once = idct_frames(basis, dct_encode(basis, x));
      const Eigen::MatrixXd twice = idct_frames(basis, dct_encode(basis, once));
      idem = std::max(idem, (twice - once).cwiseAbs().maxCoeff());
    }
  }
  const double elapsed = seconds_since(start);
  o.require(ortho <= 1e-10, fmt("orthonormality error %.3g", ortho));
  o.require(round_trip <= 1e-9, fmt("round trip error %.3g", round_trip));
  o.require(band <= 1e-9, fmt("band-limited recovery error %.3g", band));
  o.require(idem <= 1e-9, fmt("projection idempotence error %.3g", idem));
  o.require(elapsed < 1.0, fmt("took %.2fs", elapsed));
  if (o.pass)
    o.detail = fmt("ortho %.2g, round trip %.2g, band %.2g, idempotence %.2g", ortho, round_trip, band, idem) +
               fmt(" in %.3fs", elapsed);
  return o;
}

// ---- 2: gradients ----

bool close_rel(double analytic, double numeric, double rel) {
  return std::fabs(analytic - numeric) <= rel * std::max({std::fabs(analytic), std::fabs(numeric), 1e-3});
}

Outcome gradient_suite() {
  Outcome o;
  const auto start = Clock::now();
  Rng rng(202);
  int encoder_instances = 0, encoder_checked = 0, encoder_bad = 0, pool_switches = 0;
  const double step = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    EncoderConfig c;
    c.joints = 1 + trial % 4;
    c.hidden_dim = 1 + trial % 8;
    c.dct_components = 1 + trial % 3;
    c.blocks = 1 + trial % 2;
    c.layers_per_block = 1 + (trial / 2) % 2;
    EncoderParams p = init_params(c, rng());
    for (auto* t : p.tensors()) *t = uniform(t->rows(), t->cols(), 0.8, rng);
    const Eigen::MatrixXd coeffs = standard_normal(c.dct_components, 3 * c.joints, rng);
    const Eigen::VectorXd gz = standard_normal(c.joints, 1, rng);
    const auto g = backward(p, coeffs, gz);
    const auto pools = pooling_indices(p, coeffs);

    auto check = [&](double& v, double analytic, const std::function<double()>& f,
                     const std::function<bool()>& same_pool) {
      const double saved = v;
      v = saved + step;
      const double up = f();
      const bool same_up = same_pool();
      v = saved - step;
      const double down = f();
      const bool same_down = same_pool();
      v = saved;
      if (!same_up || !same_down) {
        ++pool_switches;
        return;
      }
      ++encoder_checked;
      if (!close_rel(analytic, (up - down) / (2 * step), 1e-4)) ++encoder_bad;
    };
    auto tensors = p.tensors();
    const auto grads = g.params.tensors();
    for (std::size_t t = 0; t < tensors.size(); ++t)
      for (Eigen::Index i = 0; i < tensors[t]->size(); ++i)
        check(
            tensors[t]->data()[i], grads[t]->data()[i], [&] { return gz.dot(forward(p, coeffs)); },
            [&] { return pooling_indices(p, coeffs) == pools; });
    Eigen::MatrixXd moved = coeffs;
    for (Eigen::Index i = 0; i < moved.size(); ++i)
      check(
          moved.data()[i], g.input.data()[i], [&] { return gz.dot(forward(p, moved)); },
          [&] { return pooling_indices(p, moved) == pools; });
    ++encoder_instances;
  }

  int loss_instances = 0, loss_checked = 0, loss_bad = 0;
  const double h = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const int l = 2 + trial % 11;
    const int dim = 1 + trial % 4;
    // Groups of at least two so every anchor has a positive, then shuffled.
    const int groups = std::max(1, std::min(l / 2, 1 + trial % 4));
    std::vector<std::string> cats;
    for (int i = 0; i < l; ++i) cats.push_back(std::string(1, static_cast<char>('a' + std::min(i / 2, groups - 1))));
    std::shuffle(cats.begin(), cats.end(), rng);
    std::vector<Eigen::VectorXd> z;
    for (int i = 0; i < l; ++i) z.push_back(standard_normal(dim, 1, rng));
    const double tau = 0.1 + 0.1 * (trial % 10);
    const auto r = contrastive_loss(z, cats, tau);
    for (int i = 0; i < l; ++i)
      for (int k = 0; k < dim; ++k) {
        // Fourth-order stencil: the two-point difference is roundoff-limited near 1e-9.
        const double saved = z[i](k);
        auto at = [&](double dx) {
          z[i](k) = saved + dx;
          return contrastive_loss(z, cats, tau).loss;
        };
        const double numeric = (at(-2 * h) - 8 * at(-h) + 8 * at(h) - at(2 * h)) / (12 * h);
        z[i](k) = saved;
        ++loss_checked;
        if (!close_rel(r.gradients[i](k), numeric, 1e-6)) ++loss_bad;
      }
    ++loss_instances;
  }
  const double elapsed = seconds_since(start);
  o.require(encoder_instances >= 100 && loss_instances >= 100, "fewer than 100 instances");
  o.require(encoder_bad == 0, std::to_string(encoder_bad) + " encoder entries outside 1e-4");
  o.require(pool_switches * 100 < encoder_checked, "too many max-pool switches");
  o.require(loss_bad == 0, std::to_string(loss_bad) + " loss entries outside 1e-6");
  o.require(elapsed < 30.0, fmt("took %.1fs", elapsed));
  if (o.pass)
    o.detail = std::to_string(encoder_instances) + " encoder instances (" + std::to_string(encoder_checked) +
               " entries), " + std::to_string(loss_instances) + " loss instances (" + std::to_string(loss_checked) +
               " entries)" + fmt(" in %.1fs", elapsed);
  return o;
}

// ---- 3: loss oracle ----

long double direct_loss(const std::vector<Eigen::VectorXd>& z, const std::vector<std::string>& cats, long double tau) {
  const std::size_t l = z.size();
  long double total = 0.0L;
  for (std::size_t i = 0; i < l; ++i) {
    auto sim = [&](std::size_t a, std::size_t b) {
      long double dot = 0.0L, na = 0.0L, nb = 0.0L;
      for (Eigen::Index k = 0; k < z[a].size(); ++k) {
        dot += static_cast<long double>(z[a](k)) * z[b](k);
        na += static_cast<long double>(z[a](k)) * z[a](k);
        nb += static_cast<long double>(z[b](k)) * z[b](k);
      }
      return dot / std::sqrt(na * nb);
    };
    long double denom = 0.0L;
    for (std::size_t k = 0; k < l; ++k)
      if (k != i) denom += std::exp(sim(i, k) / tau);
    for (std::size_t j = 0; j < l; ++j)
      if (j != i && cats[j] == cats[i]) total += -std::log(std::exp(sim(i, j) / tau) / denom);
  }
  return total / static_cast<long double>(l);
}

Outcome loss_oracle() {
  Outcome o;
  Rng rng(303);
  double worst = 0.0;
  const std::vector<std::vector<std::string>> layouts{
      {"a", "a", "b", "b"},
      {"a", "a", "a", "a", "b", "b", "b", "b", "c", "c", "c", "c"},
      {"x", "y", "x", "y", "x", "z", "z"},
      {"a", "a", "a", "b", "b"}};
  for (const auto& cats : layouts)
    for (double tau : {0.1, 0.5, 1.0, 2.0}) {
      std::vector<Eigen::VectorXd> z;
      for (std::size_t i = 0; i < cats.size(); ++i) z.push_back(standard_normal(5, 1, rng));
      const double got = contrastive_loss(z, cats, tau).loss;
      worst = std::max(worst, static_cast<double>(std::fabs(got - direct_loss(z, cats, tau))));
    }
  o.require(worst <= 1e-10, fmt("oracle error %.3g", worst));

  double closed = 0.0;
  for (const auto& cats : layouts) {
    const std::vector<Eigen::VectorXd> same(cats.size(), Eigen::VectorXd::Constant(4, 0.7));
    const auto r = contrastive_loss(same, cats, 0.7);
    const double l = static_cast<double>(cats.size());
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const double positives = static_cast<double>(std::count(cats.begin(), cats.end(), cats[i]) - 1);
      closed = std::max(closed, std::fabs(r.per_sample[i] - positives * std::log(l - 1)));
    }
  }
  o.require(closed <= 1e-9, fmt("closed-form error %.3g", closed));
  if (o.pass) o.detail = fmt("oracle error %.2g, identical-embedding error %.2g", worst, closed);
  return o;
}

// ---- 4: diffusion ----

Eigen::MatrixXd fuse_oracle(const DctBasis& basis, const Eigen::VectorXd& mask, const Eigen::MatrixXd& noisy,
                            const Eigen::MatrixXd& denoised) {
  const Eigen::MatrixXd& t = basis.matrix();
  const Eigen::MatrixXd n = t.transpose() * noisy;
  const Eigen::MatrixXd d = t.transpose() * denoised;
  Eigen::MatrixXd mixed(n.rows(), n.cols());
  for (Eigen::Index r = 0; r < n.rows(); ++r) mixed.row(r) = mask(r) * n.row(r) + (1.0 - mask(r)) * d.row(r);
  return t * mixed;
}

Outcome diffusion_suite() {
  Outcome o;
  const auto schedule = build_cosine_schedule(100);
  bool monotone = schedule.alpha_bar(0) <= 1.0;
  for (int t = 1; t <= 100; ++t) monotone = monotone && schedule.alpha_bar(t) < schedule.alpha_bar(t - 1) && schedule.alpha_bar(t) > 0.0;
  o.require(monotone, "schedule is not strictly decreasing in (0, 1]");

  Rng rng(404);
  double worst_moment = 0.0;
  const Eigen::MatrixXd c0 = standard_normal(20, 6, rng);
  for (int t : {1, 25, 50, 75, 100}) {
    const int draws = 10000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += forward_noise(schedule, c0, t, standard_normal(20, 6, rng)).squaredNorm();
    const double ab = schedule.alpha_bar(t);
    const double expected = ab * c0.squaredNorm() + (1.0 - ab) * static_cast<double>(c0.size());
    worst_moment = std::max(worst_moment, std::fabs(sum / draws - expected) / expected);
  }
  o.require(worst_moment <= 0.02, fmt("second moment off by %.3g relative", worst_moment));

  // Boundary masks at every reverse step with a generic predictor.
  const int frames = 60, joints = 3;
  DiffusionModel model;
  model.schedule = schedule;
  model.predictor = init_noise_predictor({20, joints, 16, 2, 8, 100}, 5);
  for (auto* t : model.predictor.tensors()) *t = uniform(t->rows(), t->cols(), 0.05, rng);
  model.frames = frames;
  model.scale = 1.7;
  const MotionSequence x(standard_normal(frames, 3 * joints, rng), joints);
  int steps = 0;
  bool exact = true;
  ddim_sample_with_completion(model, x, CompletionMask(frames, 0), 2, 1,
                              [&](int, int, const DctCoefficients& noisy, const DctCoefficients&,
                                  const DctCoefficients& fused) {
                                exact = exact && fused == noisy;
                                ++steps;
                              });
  ddim_sample_with_completion(model, x, CompletionMask(0, frames), 2, 1,
                              [&](int, int, const DctCoefficients&, const DctCoefficients& denoised,
                                  const DctCoefficients& fused) {
                                exact = exact && fused == denoised;
                                ++steps;
                              });
  o.require(exact && steps == 400, "mask boundary identities are not exact");

  // Two-step sampler with a zero predictor, unrolled by hand.
  const int small_frames = 12, m = 5, observed = 7;
  DiffusionModel tiny;
  tiny.schedule = NoiseSchedule(Eigen::Vector2d(0.9, 0.5));
  tiny.predictor = init_noise_predictor({m, 2, 8, 1, 4, 2}, 0).zeros_like();
  tiny.frames = small_frames;
  tiny.scale = 1.0;
  const MotionSequence y(standard_normal(small_frames, 6, rng), 2);
  const CompletionMask mask(observed, small_frames - observed);
  const std::uint64_t seed = 77;
  const auto out = ddim_sample_with_completion(tiny, y, mask, 3, seed);
  const DctBasis basis(m, small_frames);
  const Eigen::MatrixXd c_obs = basis.matrix() * y.frames();
  double unrolled = 0.0;
  for (int i = 0; i < 3; ++i) {
    Rng r(seed + static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd c2 = standard_normal(m, 6, r);
    const Eigen::MatrixXd d2 = std::sqrt(0.9) * (c2 / std::sqrt(0.5));
    const Eigen::MatrixXd n2 = std::sqrt(0.9) * c_obs + std::sqrt(0.1) * standard_normal(m, 6, r);
    const Eigen::MatrixXd c1 = fuse_oracle(basis, mask.values(), n2, d2);
    standard_normal(m, 6, r);
    const Eigen::MatrixXd c = fuse_oracle(basis, mask.values(), c_obs, c1 / std::sqrt(0.9));
    unrolled = std::max(unrolled, (out[static_cast<std::size_t>(i)].frames() - basis.matrix().transpose() * c).cwiseAbs().maxCoeff());
  }
  o.require(unrolled <= 1e-9, fmt("two-step sampler error %.3g", unrolled));
  if (o.pass)
    o.detail = fmt("second moment within %.2f%%, %.0f exact boundary steps, two-step error %.2g", 100 * worst_moment, steps,
                   unrolled);
  return o;
}

// ---- 5-7: end-to-end on a synthetic corpus ----

// Four categories with the last one unseen. Moderate phase jitter keeps the categories well
// separated; tempo changes after a random onset make continuations vary within a category.
Dataset acceptance_dataset() {
  auto spec = random_corpus_spec(4, 8, 20, 1);
  for (auto& c : spec.categories) {
    c.phase_jitter = 1.0;
    c.tempo_jitter = 0.5;
  }
  const auto corpus = generate_synthetic_corpus(spec, 1);
  std::vector<std::string> names;
  for (const auto& c : spec.categories) names.push_back(c.name);
  return make_dataset(corpus, names, {names.back()}, 0.5, 60, spec.joints);
}

struct Pipeline {
  Dataset dataset = acceptance_dataset();
  std::shared_ptr<const DiffusionModel> diffusion;
  EncoderParams augmented;  // trained with diffusion augmentation
  EncoderParams plain;      // trained without augmentation
  double train_seconds = 0.0;
};

EncoderConfig encoder_config(const Dataset& ds) {
  EncoderConfig c;
  c.joints = ds.manifest().joints;
  return c;
}

TrainConfig train_config() {
  TrainConfig c;
  c.epochs = 100;
  c.seed = 11;
  return c;
}

std::shared_ptr<const DiffusionModel> pretrain(const Dataset& ds) {
  std::vector<MotionSequence> train;
  for (std::size_t i = 0; i < ds.motions().size(); ++i)
    if (ds.split(i) == Split::kTrain) train.push_back(ds.motion(i).motion);
  DiffusionTrainConfig c;
  c.epochs = 1000;
  c.seed = 5;
  return std::make_shared<const DiffusionModel>(train_diffusion(train, c).model);
}

EvalReport run_eval(const Pipeline& p, const EncoderParams& params, int n_s, int n_g) {
  const DiffusionAugmenter aug(p.diffusion, 30);
  EvalConfig c;
  c.n_s = n_s;
  c.n_g = n_g;
  c.trials = 10;
  c.seed = 99;
  return evaluate(p.dataset, params, aug, c);
}

std::string per_category(const EvalReport& r) {
  std::string out;
  for (const auto& c : r.categories) out += (out.empty() ? "" : " ") + c.category + fmt("=%.3f", c.mean_auc);
  return out;
}

Outcome end_to_end(Pipeline& p) {
  Outcome o;
  const auto start = Clock::now();
  p.diffusion = pretrain(p.dataset);
  const DiffusionAugmenter aug(p.diffusion, 30);
  p.augmented = train(p.dataset, encoder_config(p.dataset), aug, train_config()).params;
  const auto report = run_eval(p, p.augmented, 3, 10);
  const double elapsed = seconds_since(start);
  p.train_seconds = elapsed;
  bool unseen_present = false;
  for (const auto& c : report.categories) {
    o.require(!c.skipped, c.category + " was skipped");
    o.require(c.mean_auc >= 0.90, c.category + fmt(" AUC %.3f < 0.90", c.mean_auc));
    unseen_present = unseen_present || c.category == p.dataset.manifest().categories.back();
  }
  o.require(report.categories.size() == 4 && unseen_present, "not every category was evaluated");
  o.require(elapsed <= 300.0, fmt("took %.0fs", elapsed));
  o.detail = (o.pass ? "" : o.detail + " | ") + per_category(report) + fmt(", mean %.3f in %.0fs", report.mean_auc, elapsed);
  return o;
}

Outcome augmentation_ablation(Pipeline& p) {
  Outcome o;
  const IdentityAugmenter none;
  auto cfg = train_config();
  cfg.n_g = 0;
  p.plain = train(p.dataset, encoder_config(p.dataset), none, cfg).params;
  const auto without = run_eval(p, p.plain, 3, 0);
  const auto with_train = run_eval(p, p.augmented, 3, 0);
  const auto with_both = run_eval(p, p.augmented, 3, 10);
  const double gain = with_train.mean_auc - without.mean_auc;
  const double std_cut = 1.0 - with_both.mean_std / with_train.mean_std;
  o.require(gain >= 0.02, fmt("training-time augmentation changed mean AUC by %+.3f (needs >= +0.02)", gain));
  o.require(std_cut >= 0.10, fmt("inference-time augmentation cut std by %.1f%% (needs >= 10%%)", 100 * std_cut));
  o.detail = (o.pass ? "" : o.detail + " | ") +
             fmt("mean AUC none %.4f vs train-aug %.4f; std without / with inference aug %.4f / %.4f",
                 without.mean_auc, with_train.mean_auc, with_train.mean_std, with_both.mean_std);
  return o;
}

Outcome support_trend(const Pipeline& p) {
  Outcome o;
  const auto one = run_eval(p, p.augmented, 1, 10);
  const auto five = run_eval(p, p.augmented, 5, 10);
  o.require(five.mean_auc >= one.mean_auc - 0.02, fmt("AUC N_s=5 %.4f < N_s=1 %.4f - 0.02", five.mean_auc, one.mean_auc));
  o.require(five.mean_std <= one.mean_std, fmt("std N_s=5 %.4f > N_s=1 %.4f", five.mean_std, one.mean_std));
  o.detail = (o.pass ? "" : o.detail + " | ") +
             fmt("N_s=1 AUC %.4f std %.4f; N_s=5 AUC %.4f std %.4f", one.mean_auc, one.mean_std, five.mean_auc, five.mean_std);
  return o;
}

// ---- 8: determinism ----

Outcome determinism() {
  Outcome o;
  auto spec = random_corpus_spec(3, 4, 8, 21);
  for (auto& c : spec.categories) c.tempo_jitter = 0.3;
  const auto corpus = generate_synthetic_corpus(spec, 21);
  const Dataset ds = make_dataset(corpus, {"action0", "action1", "action2"}, {"action2"}, 0.5, 40, 4);
  std::vector<MotionSequence> train_set;
  for (std::size_t i = 0; i < ds.motions().size(); ++i)
    if (ds.split(i) == Split::kTrain) train_set.push_back(ds.motion(i).motion);
  DiffusionTrainConfig dc;
  dc.steps = 20;
  dc.dct_components = 10;
  dc.hidden = 32;
  dc.epochs = 20;
  dc.batch_size = 8;
  dc.seed = 3;
  const auto model = std::make_shared<const DiffusionModel>(train_diffusion(train_set, dc).model);
  const DiffusionAugmenter aug(model, 20);

  EncoderConfig ec;
  ec.joints = 4;
  ec.hidden_dim = 16;
  ec.blocks = 2;
  TrainConfig tc;
  tc.epochs = 5;
  tc.n_g = 2;
  tc.seed = 8;
  const auto a = train(ds, ec, aug, tc);
  const auto b = train(ds, ec, aug, tc);
  bool same_train = a.log.size() == b.log.size();
  for (std::size_t i = 0; same_train && i < a.log.size(); ++i) same_train = a.log[i].loss == b.log[i].loss;
  const auto ta = a.params.tensors(), tb = b.params.tensors();
  for (std::size_t i = 0; same_train && i < ta.size(); ++i) same_train = *ta[i] == *tb[i];
  o.require(same_train, "train reruns differ");

  EvalConfig ev;
  ev.n_s = 2;
  ev.n_g = 2;
  ev.trials = 3;
  ev.seed = 4;
  const auto ra = evaluate(ds, a.params, aug, ev);
  const auto rb = evaluate(ds, a.params, aug, ev);
  bool same_eval = ra.categories.size() == rb.categories.size() && ra.mean_auc == rb.mean_auc && ra.mean_std == rb.mean_std;
  for (std::size_t i = 0; same_eval && i < ra.categories.size(); ++i)
    same_eval = ra.categories[i].trial_auc == rb.categories[i].trial_auc;
  o.require(same_eval, "eval reruns differ");

  const auto& x = ds.motion(0).motion;
  const auto sa = ddim_sample_with_completion(*model, x, CompletionMask(20, 20), 3, 17);
  const auto sb = ddim_sample_with_completion(*model, x, CompletionMask(20, 20), 3, 17);
  bool same_ddim = sa.size() == 3 && sb.size() == 3;
  for (std::size_t i = 0; same_ddim && i < sa.size(); ++i) same_ddim = sa[i] == sb[i];
  o.require(same_ddim, "sampler reruns differ");
  if (o.pass) o.detail = "train, eval and sampler reruns are bitwise identical";
  return o;
}

// ---- 9: AUC ----

double brute_auc(const std::vector<double>& normal, const std::vector<double>& anomalous) {
  double wins = 0.0;
  for (double a : anomalous)
    for (double n : normal) wins += a > n ? 1.0 : (a == n ? 0.5 : 0.0);
  return wins / static_cast<double>(normal.size() * anomalous.size());
}

Outcome auc_oracle() {
  Outcome o;
  const double alphabet[3] = {0.0, 0.5, 1.0};
  long lists = 0, bad = 0;
  for (int len = 2; len <= 6; ++len) {
    long combos = 1;
    for (int i = 0; i < len; ++i) combos *= 3;
    for (long code = 0; code < combos; ++code) {
      std::vector<double> scores;
      for (long c = code, i = 0; i < len; ++i, c /= 3) scores.push_back(alphabet[c % 3]);
      // Every split of the list into a non-empty normal prefix and anomalous suffix, and every labeling.
      for (int mask = 1; mask < (1 << len) - 1; ++mask) {
        std::vector<double> normal, anomalous;
        for (int i = 0; i < len; ++i) (mask >> i & 1 ? anomalous : normal).push_back(scores[i]);
        ++lists;
        if (auc(normal, anomalous) != brute_auc(normal, anomalous)) ++bad;
      }
    }
  }
  o.require(bad == 0, std::to_string(bad) + " mismatching labelings");
  if (o.pass) o.detail = std::to_string(lists) + " labeled score lists match brute force exactly";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  Pipeline pipeline;
  const std::vector<Criterion> criteria{
      {1, "DCT suite", dct_suite},
      {2, "gradient suite", gradient_suite},
      {3, "loss oracle", loss_oracle},
      {4, "diffusion suite", diffusion_suite},
      {5, "end-to-end synthetic detection", [&] { return end_to_end(pipeline); }},
      {6, "augmentation ablation", [&] { return augmentation_ablation(pipeline); }},
      {7, "support-size trend", [&] { return support_trend(pipeline); }},
      {8, "determinism", determinism},
      {9, "AUC oracle", auc_oracle},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
