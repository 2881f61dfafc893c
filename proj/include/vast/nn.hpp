#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

namespace vast {

/// Row-major 2D tensor; vectors are rows x 1.
struct Tensor {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

struct DenseLayer {
    Tensor w;  // out x in
    Tensor b;  // out x 1
};

/// Fully-connected net with rectifier hidden units and a linear head.
/// Initialization is uniform fan-in scaled.
class Mlp {
public:
    Mlp() = default;

    /// sizes = {in, hidden..., out}
    Mlp(const std::vector<std::size_t>& sizes, std::mt19937_64& rng) {
        layers_.reserve(sizes.size() - 1);
        for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
            DenseLayer layer{Tensor(sizes[i + 1], sizes[i]), Tensor(sizes[i + 1], 1)};
            double bound = 1.0 / std::sqrt(static_cast<double>(sizes[i]));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (double& v : layer.w.data) v = dist(rng);
            for (double& v : layer.b.data) v = dist(rng);
            layers_.push_back(std::move(layer));
        }
    }

    std::size_t input_dim() const { return layers_.front().w.cols; }
    std::size_t output_dim() const { return layers_.back().w.rows; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    struct Cache {
        std::vector<double> input;
        std::vector<std::vector<double>> pre;   // pre-activation per layer
        std::vector<std::vector<double>> post;  // post-activation per layer
    };

    std::vector<double> forward(const std::vector<double>& x, Cache* cache = nullptr) const {
        if (x.size() != input_dim()) throw std::invalid_argument("mlp input size mismatch");
        if (cache) {
            cache->input = x;
            cache->pre.clear();
            cache->post.clear();
        }
        std::vector<double> act = x;
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            const DenseLayer& layer = layers_[li];
            std::vector<double> z(layer.w.rows);
            for (std::size_t r = 0; r < layer.w.rows; ++r) {
                double acc = layer.b.data[r];
                const double* wrow = layer.w.data.data() + r * layer.w.cols;
                for (std::size_t c = 0; c < layer.w.cols; ++c) acc += wrow[c] * act[c];
                z[r] = acc;
            }
            if (cache) cache->pre.push_back(z);
            if (li + 1 < layers_.size())
                for (double& v : z) v = v > 0.0 ? v : 0.0;
            if (cache) cache->post.push_back(z);
            act = std::move(z);
        }
        return act;
    }

    /// Accumulates parameter gradients into `grads` (same shape as *this)
    /// and returns the gradient w.r.t. the input.
    std::vector<double> backward(const Cache& cache, const std::vector<double>& dout,
                                 Mlp& grads) const {
        std::vector<double> dz = dout;
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const DenseLayer& layer = layers_[li];
            DenseLayer& g = grads.layers_[li];
            if (li + 1 < layers_.size())  // rectifier gate (head is linear)
                for (std::size_t r = 0; r < dz.size(); ++r)
                    if (cache.pre[li][r] <= 0.0) dz[r] = 0.0;
            const std::vector<double>& in = li == 0 ? cache.input : cache.post[li - 1];
            for (std::size_t r = 0; r < layer.w.rows; ++r) {
                g.b.data[r] += dz[r];
                double* grow = g.w.data.data() + r * layer.w.cols;
                for (std::size_t c = 0; c < layer.w.cols; ++c) grow[c] += dz[r] * in[c];
            }
            std::vector<double> din(layer.w.cols, 0.0);
            for (std::size_t r = 0; r < layer.w.rows; ++r) {
                const double* wrow = layer.w.data.data() + r * layer.w.cols;
                for (std::size_t c = 0; c < layer.w.cols; ++c) din[c] += wrow[c] * dz[r];
            }
            dz = std::move(din);
        }
        return dz;
    }

    /// Zero-valued clone with identical shapes, for gradient accumulators.
    Mlp zeros_like() const {
        Mlp z;
        z.layers_.reserve(layers_.size());
        for (const DenseLayer& layer : layers_)
            z.layers_.push_back(DenseLayer{Tensor(layer.w.rows, layer.w.cols),
                                           Tensor(layer.b.rows, 1)});
        return z;
    }

private:
    std::vector<DenseLayer> layers_;
};

// --- flat binary checkpoint io -------------------------------------------
// Layout per tensor: u32 rows, u32 cols, rows*cols doubles (row-major,
// little-endian as written by the host). Files begin with u32 magic
// 0x56535450 ("VSTP") and u32 version, then u32 tensor count.

namespace io {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw std::runtime_error("checkpoint truncated");
    return v;
}
inline void write_tensor(std::ostream& os, const Tensor& t) {
    write_u32(os, static_cast<std::uint32_t>(t.rows));
    write_u32(os, static_cast<std::uint32_t>(t.cols));
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * sizeof(double)));
}
inline Tensor read_tensor(std::istream& is) {
    std::uint32_t rows = read_u32(is), cols = read_u32(is);
    Tensor t(rows, cols);
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint truncated");
    return t;
}

constexpr std::uint32_t kCheckpointMagic = 0x56535450;
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace io

struct AdamConfig {
    double learning_rate = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction over a flat view of parameter tensors.
class Adam {
public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    const AdamConfig& config() const { return config_; }

    /// params and grads are parallel tensor lists (same shapes, same order).
    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
        if (m_.empty()) {
            for (const Tensor* p : params) {
                m_.emplace_back(p->rows, p->cols);
                v_.emplace_back(p->rows, p->cols);
            }
        }
        ++t_;
        double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i]->data;
            const auto& g = grads[i]->data;
            auto& m = m_[i].data;
            auto& v = v_[i].data;
            for (std::size_t j = 0; j < p.size(); ++j) {
                m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
                v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
                double mhat = m[j] / bc1;
                double vhat = v[j] / bc2;
                p[j] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
            }
        }
    }

    std::uint64_t steps_taken() const { return t_; }

private:
    AdamConfig config_;
    std::uint64_t t_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace vast
