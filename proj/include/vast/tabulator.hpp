#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "vast/nn.hpp"
#include "vast/types.hpp"
#include "vast/variational.hpp"

namespace vast {

using Observation = std::vector<double>;

/// Sliding window of the last k+1 observation frames; frames before episode
/// start are blank (all-zero).
class ObservationHistory {
public:
    ObservationHistory(std::uint32_t k, std::size_t frame_dim)
        : k_(k), frame_dim_(frame_dim) {
        reset();
    }

    void reset() {
        frames_.assign(k_ + 1, Observation(frame_dim_, 0.0));
    }

    void push(const Observation& o) {
        if (o.size() != frame_dim_)
            throw std::invalid_argument("observation dimension mismatch");
        frames_.pop_front();
        frames_.push_back(o);
    }

    std::uint32_t k() const { return k_; }
    std::size_t frame_dim() const { return frame_dim_; }
    std::size_t flat_dim() const { return (k_ + 1) * frame_dim_; }
    const Observation& last() const { return frames_.back(); }

    std::vector<double> flatten() const {
        std::vector<double> out;
        out.reserve(flat_dim());
        for (const Observation& f : frames_) out.insert(out.end(), f.begin(), f.end());
        return out;
    }

private:
    std::uint32_t k_;
    std::size_t frame_dim_;
    std::deque<Observation> frames_;
};

/// Observation-history -> StateId map. `generation` increments whenever the
/// mapping may have changed; encode is deterministic within one generation.
class Tabulator {
public:
    virtual ~Tabulator() = default;
    virtual StateId encode(const ObservationHistory& history) const = 0;
    virtual std::uint64_t generation() const { return 0; }
    virtual std::uint32_t bits() const = 0;
};

/// One grid dimension: values are divided by cell_size, floored, and either
/// clamped into the allocated cell range or wrapped (for angular headings).
struct GridDim {
    double cell_size = 1.0;
    std::uint32_t bits = 4;
    bool wrap = false;
    double wrap_range = 360.0;  // used only when wrap is set
};

/// Fixed discretisation by rounding. Bit packing is little-endian by
/// dimension then by bit: dimension 0 occupies the lowest bits.
class GridTabulator final : public Tabulator {
public:
    explicit GridTabulator(std::vector<GridDim> dims) : dims_(std::move(dims)) {
        std::uint32_t total = 0;
        for (const GridDim& d : dims_) total += d.bits;
        if (total > 64) throw std::invalid_argument("grid bit allocation exceeds 64");
        bits_ = total;
    }

    StateId encode(const ObservationHistory& history) const override {
        const Observation& o = history.last();
        if (o.size() != dims_.size())
            throw std::invalid_argument("grid tabulator dimension mismatch");
        std::uint64_t code = 0;
        std::uint32_t shift = 0;
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            code |= static_cast<std::uint64_t>(cell_index(o[i], dims_[i])) << shift;
            shift += dims_[i].bits;
        }
        return StateId{code};
    }

    std::uint32_t bits() const override { return bits_; }

    /// Center coordinate of the cell a value maps into (analysis helper).
    double cell_center(std::size_t dim, std::uint64_t cell) const {
        return (static_cast<double>(cell) + 0.5) * dims_[dim].cell_size;
    }

    std::uint64_t extract_cell(StateId s, std::size_t dim) const {
        std::uint32_t shift = 0;
        for (std::size_t i = 0; i < dim; ++i) shift += dims_[i].bits;
        return (s.code >> shift) & ((1ULL << dims_[dim].bits) - 1);
    }

    const std::vector<GridDim>& dims() const { return dims_; }

private:
    static std::uint64_t cell_index(double value, const GridDim& dim) {
        std::uint64_t cells = 1ULL << dim.bits;
        if (dim.wrap) {
            double wrapped = std::fmod(value, dim.wrap_range);
            if (wrapped < 0.0) wrapped += dim.wrap_range;
            auto cell = static_cast<std::uint64_t>(wrapped / dim.cell_size);
            return cell % cells;
        }
        if (value < 0.0) return 0;
        auto cell = static_cast<std::uint64_t>(value / dim.cell_size);
        return cell >= cells ? cells - 1 : cell;
    }

    std::vector<GridDim> dims_;
    std::uint32_t bits_;
};

/// Random-projection LSH over the flattened history (the baseline uses only
/// the current frame, so pair it with k = 0). Bit i is H(v_i . o) with fixed
/// projections drawn once from a standard normal; H(0) = 0.
class LSHTabulator final : public Tabulator {
public:
    LSHTabulator(std::uint32_t d, std::size_t input_dim, std::uint64_t seed)
        : d_(d), input_dim_(input_dim) {
        if (d > 64) throw std::invalid_argument("lsh latent width exceeds 64");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        projections_.resize(d);
        for (auto& row : projections_) {
            row.resize(input_dim);
            for (double& v : row) v = normal(rng);
        }
    }

    StateId encode(const ObservationHistory& history) const override {
        std::vector<double> flat = history.flatten();
        if (flat.size() != input_dim_)
            throw std::invalid_argument("lsh tabulator dimension mismatch");
        std::uint64_t code = 0;
        for (std::uint32_t i = 0; i < d_; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < input_dim_; ++j)
                dot += projections_[i][j] * flat[j];
            if (dot > 0.0) code |= (1ULL << i);
        }
        return StateId{code};
    }

    std::uint32_t bits() const override { return d_; }
    const std::vector<std::vector<double>>& projections() const { return projections_; }

private:
    std::uint32_t d_;
    std::size_t input_dim_;
    std::vector<std::vector<double>> projections_;
};

/// Adapter over the learned encoder's Bernoulli mode. Holds an immutable
/// parameter snapshot; swapping in a new snapshot bumps the generation.
class LearnedTabulator final : public Tabulator {
public:
    LearnedTabulator(std::shared_ptr<const Mlp> encoder, std::uint32_t d)
        : encoder_(std::move(encoder)), d_(d) {}

    StateId encode(const ObservationHistory& history) const override {
        return bernoulli_mode(encoder_->forward(history.flatten()));
    }

    std::uint64_t generation() const override { return generation_; }
    std::uint32_t bits() const override { return d_; }

    void set_snapshot(std::shared_ptr<const Mlp> encoder) {
        encoder_ = std::move(encoder);
        ++generation_;
    }

private:
    std::shared_ptr<const Mlp> encoder_;
    std::uint32_t d_;
    std::uint64_t generation_ = 0;
};

}  // namespace vast
