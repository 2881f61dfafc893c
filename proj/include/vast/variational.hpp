#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "vast/nn.hpp"
#include "vast/types.hpp"

namespace vast {

struct VariationalConfig {
    std::uint32_t d = 8;             // latent bits
    std::uint32_t k = 0;             // extra history frames (input is k+1 frames)
    std::uint32_t obs_dim = 2;       // observation vector length
    std::uint32_t action_count = 4;  // transition heads
    double lambda_post = 2.0 / 3.0;  // temperature for posterior samples
    double lambda_prior = 0.5;       // temperature for transition/initial log-probs
    std::uint32_t minibatch = 128;
    AdamConfig adam;                 // learning rate and moment constants
    std::vector<std::size_t> hidden = {16, 16};
    std::uint64_t init_seed = 1;

    std::size_t encoder_input_dim() const {
        return static_cast<std::size_t>(k + 1) * obs_dim;
    }
};

/// Encoder/decoder/transition/initial parameter groups.
struct ModelParams {
    Mlp encoder;                      // history -> d logits
    Mlp decoder;                      // d -> observation mean
    std::vector<Mlp> transition;      // per action: d -> d logits
    Tensor initial_logits;            // d x 1, the initial-state distribution

    static ModelParams init(const VariationalConfig& cfg) {
        std::mt19937_64 rng(cfg.init_seed);
        ModelParams p;
        std::vector<std::size_t> enc{cfg.encoder_input_dim()};
        enc.insert(enc.end(), cfg.hidden.begin(), cfg.hidden.end());
        enc.push_back(cfg.d);
        p.encoder = Mlp(enc, rng);

        std::vector<std::size_t> dec{cfg.d};
        dec.insert(dec.end(), cfg.hidden.begin(), cfg.hidden.end());
        dec.push_back(cfg.obs_dim);
        p.decoder = Mlp(dec, rng);

        std::vector<std::size_t> trn{cfg.d};
        trn.insert(trn.end(), cfg.hidden.begin(), cfg.hidden.end());
        trn.push_back(cfg.d);
        p.transition.reserve(cfg.action_count);
        for (std::uint32_t a = 0; a < cfg.action_count; ++a)
            p.transition.emplace_back(trn, rng);

        p.initial_logits = Tensor(cfg.d, 1);
        return p;
    }

    ModelParams zeros_like() const {
        ModelParams z;
        z.encoder = encoder.zeros_like();
        z.decoder = decoder.zeros_like();
        z.transition.reserve(transition.size());
        for (const Mlp& t : transition) z.transition.push_back(t.zeros_like());
        z.initial_logits = Tensor(initial_logits.rows, 1);
        return z;
    }

    /// Canonical tensor order, used by Adam, checkpoints and gradient checks.
    template <typename Self, typename Fn>
    static void visit(Self& self, Fn&& fn) {
        for (auto& layer : self.encoder.layers()) {
            fn(layer.w);
            fn(layer.b);
        }
        for (auto& layer : self.decoder.layers()) {
            fn(layer.w);
            fn(layer.b);
        }
        for (auto& mlp : self.transition)
            for (auto& layer : mlp.layers()) {
                fn(layer.w);
                fn(layer.b);
            }
        fn(self.initial_logits);
    }

    std::vector<Tensor*> tensors() {
        std::vector<Tensor*> out;
        visit(*this, [&out](Tensor& t) { out.push_back(&t); });
        return out;
    }
    std::vector<const Tensor*> tensors() const {
        std::vector<const Tensor*> out;
        visit(*this, [&out](const Tensor& t) { out.push_back(&t); });
        return out;
    }

    void save(std::ostream& os) const {
        io::write_u32(os, io::kCheckpointMagic);
        io::write_u32(os, io::kCheckpointVersion);
        auto list = tensors();
        io::write_u32(os, static_cast<std::uint32_t>(list.size()));
        for (const Tensor* t : list) io::write_tensor(os, *t);
    }

    void load(std::istream& is) {
        if (io::read_u32(is) != io::kCheckpointMagic)
            throw std::runtime_error("checkpoint: bad magic");
        if (io::read_u32(is) != io::kCheckpointVersion)
            throw std::runtime_error("checkpoint: unsupported version");
        auto list = tensors();
        if (io::read_u32(is) != list.size())
            throw std::runtime_error("checkpoint: tensor count mismatch");
        for (Tensor* t : list) {
            Tensor loaded = io::read_tensor(is);
            if (loaded.rows != t->rows || loaded.cols != t->cols)
                throw std::runtime_error("checkpoint: tensor shape mismatch");
            *t = std::move(loaded);
        }
    }
};

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

/// Relaxed (binary Con-crete) sample: values = sigmoid((logits + L)/lambda)
/// with L the retained logistic noise, so a draw is reproducible and
/// differentiable in the logits.
struct ConcreteSample {
    std::vector<double> values;
    std::vector<double> noise;
};

template <typename Rng>
inline double logistic_draw(Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u;
    do {
        u = unit(rng);
    } while (u <= 0.0 || u >= 1.0);
    return std::log(u) - std::log1p(-u);
}

template <typename Rng>
ConcreteSample concrete_sample(const std::vector<double>& logits, double lambda,
                               Rng& rng) {
    if (lambda <= 0.0) throw std::invalid_argument("temperature must be positive");
    ConcreteSample s;
    s.noise.reserve(logits.size());
    s.values.reserve(logits.size());
    for (double x : logits) {
        double l = logistic_draw(rng);
        s.noise.push_back(l);
        s.values.push_back(sigmoid((x + l) / lambda));
    }
    return s;
}

/// Bernoulli mode: threshold the logits at zero (H(0) = 0).
inline StateId bernoulli_mode(const std::vector<double>& logits) {
    StateId s;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (logits[i] > 0.0) s.code |= (1ULL << i);
    return s;
}

// --- relaxed-Bernoulli log-density, logit parameterization ----------------
// For a sample with pre-sigmoid y (value v = sigmoid(y)) under location
// logits alpha and temperature lambda:
//   log p(v) = log lambda + softplus(y) + softplus(-y)
//              - softplus(u) - softplus(-u),      u = lambda*y - alpha.
// Working in y keeps saturated samples finite.

inline double concrete_log_density(double y, double alpha, double lambda) {
    double u = lambda * y - alpha;
    return std::log(lambda) + softplus(y) + softplus(-y) - softplus(u) - softplus(-u);
}
inline double concrete_log_density_dy(double y, double alpha, double lambda) {
    double u = lambda * y - alpha;
    return (2.0 * sigmoid(y) - 1.0) - lambda * (2.0 * sigmoid(u) - 1.0);
}
inline double concrete_log_density_dalpha(double y, double alpha, double lambda) {
    double u = lambda * y - alpha;
    return 2.0 * sigmoid(u) - 1.0;
}

/// Closed-form entropy of the factorized Bernoulli posterior with logits x.
inline double bernoulli_entropy(const std::vector<double>& logits) {
    double h = 0.0;
    for (double x : logits) {
        // -p log p - (1-p) log(1-p) = softplus(x) - x*sigmoid(x), stable form
        h += softplus(x) - x * sigmoid(x);
    }
    return h;
}

/// Per-minibatch free-energy decomposition; total F = R + T - H.
struct FreeEnergyBreakdown {
    double reconstruction = 0.0;  // sum of R_t
    double transition = 0.0;      // sum of T_t, initial-state term included
    double entropy = 0.0;         // sum of H_t
    double total() const { return reconstruction + transition - entropy; }
};

/// One training window: step j of an episode with its two encoder inputs.
/// `initial` marks j-1 == 0, where the initial-state term applies to the
/// previous sample.
struct MinibatchItem {
    std::vector<double> history_prev;  // flattened o_{j-k-1 : j-1}
    std::vector<double> history_cur;   // flattened o_{j-k : j}
    std::vector<double> obs_target;    // o_j
    ActionId action = 0;
    bool initial = false;
    // bookkeeping for reassignment emission (opaque to the math)
    std::uint64_t episode_id = 0;
    std::size_t index = 0;             // j within the episode
    StateId stored_prev;
    StateId stored_cur;
};

/// Logistic noise drawn once per item so the objective is a deterministic
/// function of the parameters (reparameterization with fixed noise).
struct NoiseDraws {
    std::vector<std::vector<double>> prev;  // per item, d draws
    std::vector<std::vector<double>> cur;
};

template <typename Rng>
NoiseDraws draw_noise(std::size_t items, std::uint32_t d, Rng& rng) {
    NoiseDraws n;
    n.prev.resize(items);
    n.cur.resize(items);
    for (std::size_t i = 0; i < items; ++i) {
        n.prev[i].reserve(d);
        n.cur[i].reserve(d);
        for (std::uint32_t j = 0; j < d; ++j) n.prev[i].push_back(logistic_draw(rng));
        for (std::uint32_t j = 0; j < d; ++j) n.cur[i].push_back(logistic_draw(rng));
    }
    return n;
}

namespace detail {

struct ItemTerms {
    double r = 0.0, t = 0.0, h = 0.0;
};

/// Forward pass for one window; optionally accumulates exact reverse-mode
/// gradients of (R + T - H) into `grads`.
inline ItemTerms free_energy_item(const MinibatchItem& item,
                                  const std::vector<double>& noise_prev,
                                  const std::vector<double>& noise_cur,
                                  const ModelParams& params,
                                  const VariationalConfig& cfg, ModelParams* grads) {
    const double l1 = cfg.lambda_post;
    const double l2 = cfg.lambda_prior;
    const std::uint32_t d = cfg.d;

    Mlp::Cache enc_prev_cache, enc_cur_cache, dec_cache, trn_cache;
    std::vector<double> x_prev =
        params.encoder.forward(item.history_prev, grads ? &enc_prev_cache : nullptr);
    std::vector<double> x_cur =
        params.encoder.forward(item.history_cur, grads ? &enc_cur_cache : nullptr);

    std::vector<double> y_prev(d), y_cur(d), v_prev(d), v_cur(d);
    for (std::uint32_t i = 0; i < d; ++i) {
        y_prev[i] = (x_prev[i] + noise_prev[i]) / l1;
        y_cur[i] = (x_cur[i] + noise_cur[i]) / l1;
        v_prev[i] = sigmoid(y_prev[i]);
        v_cur[i] = sigmoid(y_cur[i]);
    }

    ItemTerms terms;

    // reconstruction: unit-variance Gaussian decoder over the observation
    std::vector<double> mu = params.decoder.forward(v_cur, grads ? &dec_cache : nullptr);
    constexpr double kHalfLog2Pi = 0.91893853320467274178;
    terms.r = kHalfLog2Pi * static_cast<double>(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double err = mu[i] - item.obs_target[i];
        terms.r += 0.5 * err * err;
    }

    // transition: relaxed-Bernoulli log-density of the current sample under
    // the per-action transition head, evaluated at the prior temperature
    const Mlp& trn = params.transition[item.action];
    std::vector<double> alpha = trn.forward(v_prev, grads ? &trn_cache : nullptr);
    for (std::uint32_t i = 0; i < d; ++i)
        terms.t -= concrete_log_density(y_cur[i], alpha[i], l2);

    // initial-state term when the previous sample is the episode head
    if (item.initial)
        for (std::uint32_t i = 0; i < d; ++i)
            terms.t -= concrete_log_density(y_prev[i], params.initial_logits.data[i], l2);

    terms.h = bernoulli_entropy(x_cur);

    if (grads) {
        std::vector<double> dy_prev(d, 0.0), dy_cur(d, 0.0);

        std::vector<double> dmu(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) dmu[i] = mu[i] - item.obs_target[i];
        std::vector<double> dv_cur_dec =
            params.decoder.backward(dec_cache, dmu, grads->decoder);

        std::vector<double> dalpha(d);
        for (std::uint32_t i = 0; i < d; ++i)
            dalpha[i] = -concrete_log_density_dalpha(y_cur[i], alpha[i], l2);
        std::vector<double> dv_prev_trn =
            trn.backward(trn_cache, dalpha, grads->transition[item.action]);

        for (std::uint32_t i = 0; i < d; ++i) {
            dy_cur[i] += dv_cur_dec[i] * v_cur[i] * (1.0 - v_cur[i]);
            dy_cur[i] -= concrete_log_density_dy(y_cur[i], alpha[i], l2);
            dy_prev[i] += dv_prev_trn[i] * v_prev[i] * (1.0 - v_prev[i]);
        }
        if (item.initial) {
            for (std::uint32_t i = 0; i < d; ++i) {
                double theta0 = params.initial_logits.data[i];
                grads->initial_logits.data[i] -=
                    concrete_log_density_dalpha(y_prev[i], theta0, l2);
                dy_prev[i] -= concrete_log_density_dy(y_prev[i], theta0, l2);
            }
        }

        std::vector<double> dx_prev(d), dx_cur(d);
        for (std::uint32_t i = 0; i < d; ++i) {
            dx_prev[i] = dy_prev[i] / l1;
            // entropy enters F with a minus sign; dH/dx = -x p (1-p)
            double p = sigmoid(x_cur[i]);
            dx_cur[i] = dy_cur[i] / l1 + x_cur[i] * p * (1.0 - p);
        }
        params.encoder.backward(enc_prev_cache, dx_prev, grads->encoder);
        params.encoder.backward(enc_cur_cache, dx_cur, grads->encoder);
    }
    return terms;
}

}  // namespace detail

/// Monte-Carlo free energy of a minibatch under fixed noise.
inline FreeEnergyBreakdown free_energy(const std::vector<MinibatchItem>& batch,
                                       const NoiseDraws& noise,
                                       const ModelParams& params,
                                       const VariationalConfig& cfg,
                                       ModelParams* grads = nullptr) {
    FreeEnergyBreakdown fe;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        auto terms = detail::free_energy_item(batch[i], noise.prev[i], noise.cur[i],
                                              params, cfg, grads);
        if (!std::isfinite(terms.r) || !std::isfinite(terms.t) || !std::isfinite(terms.h))
            throw std::runtime_error("free energy diverged (non-finite term)");
        fe.reconstruction += terms.r;
        fe.transition += terms.t;
        fe.entropy += terms.h;
    }
    return fe;
}

template <typename Rng>
FreeEnergyBreakdown free_energy(const std::vector<MinibatchItem>& batch,
                                const ModelParams& params,
                                const VariationalConfig& cfg, Rng& rng) {
    NoiseDraws noise = draw_noise(batch.size(), cfg.d, rng);
    return free_energy(batch, noise, params, cfg);
}

/// Exact reverse-mode gradients of the fixed-noise objective.
inline FreeEnergyBreakdown grad_free_energy(const std::vector<MinibatchItem>& batch,
                                            const NoiseDraws& noise,
                                            const ModelParams& params,
                                            const VariationalConfig& cfg,
                                            ModelParams& grads_out) {
    return free_energy(batch, noise, params, cfg, &grads_out);
}

/// Central finite differences of the same fixed-noise objective; the
/// independent route for gradient verification.
inline ModelParams finite_difference_gradients(const std::vector<MinibatchItem>& batch,
                                               const NoiseDraws& noise,
                                               ModelParams params,
                                               const VariationalConfig& cfg,
                                               double step = 1e-5) {
    ModelParams fd = params.zeros_like();
    auto param_tensors = params.tensors();
    auto fd_tensors = fd.tensors();
    for (std::size_t t = 0; t < param_tensors.size(); ++t) {
        Tensor* pt = param_tensors[t];
        for (std::size_t i = 0; i < pt->data.size(); ++i) {
            double saved = pt->data[i];
            pt->data[i] = saved + step;
            double up = free_energy(batch, noise, params, cfg).total();
            pt->data[i] = saved - step;
            double down = free_energy(batch, noise, params, cfg).total();
            pt->data[i] = saved;
            fd_tensors[t]->data[i] = (up - down) / (2.0 * step);
        }
    }
    return fd;
}

struct ReassignRequest {
    std::uint64_t episode_id = 0;
    std::size_t index = 0;
    StateId new_state;
};

struct TrainStepResult {
    FreeEnergyBreakdown free_energy;
    std::vector<ReassignRequest> requests;
};

/// Owns the model parameters and optimizer state. One train_step performs a
/// minibatch gradient step and emits reassignment requests for sampled steps
/// whose Bernoulli mode moved; applying them is the agent's job.
class VariationalTrainer {
public:
    explicit VariationalTrainer(VariationalConfig cfg)
        : cfg_(cfg), params_(ModelParams::init(cfg)), adam_(cfg.adam) {}

    const VariationalConfig& config() const { return cfg_; }
    const ModelParams& params() const { return params_; }
    ModelParams& mutable_params() { return params_; }

    StateId encode_mode(const std::vector<double>& flat_history) const {
        return bernoulli_mode(params_.encoder.forward(flat_history));
    }

    template <typename Rng>
    TrainStepResult train_step(const std::vector<MinibatchItem>& batch, Rng& rng) {
        NoiseDraws noise = draw_noise(batch.size(), cfg_.d, rng);
        ModelParams grads = params_.zeros_like();
        TrainStepResult result;
        result.free_energy = grad_free_energy(batch, noise, params_, cfg_, grads);

        // mode recomputation uses the pre-step parameters, as the requests
        // are interleaved with gradient collection
        for (const MinibatchItem& item : batch) {
            StateId new_prev = encode_mode(item.history_prev);
            if (new_prev != item.stored_prev)
                result.requests.push_back(
                    ReassignRequest{item.episode_id, item.index - 1, new_prev});
            StateId new_cur = encode_mode(item.history_cur);
            if (new_cur != item.stored_cur)
                result.requests.push_back(
                    ReassignRequest{item.episode_id, item.index, new_cur});
        }

        auto params = params_.tensors();
        auto grad_list = static_cast<const ModelParams&>(grads).tensors();
        adam_.step(params, grad_list);
        return result;
    }

private:
    VariationalConfig cfg_;
    ModelParams params_;
    Adam adam_;
};

}  // namespace vast
