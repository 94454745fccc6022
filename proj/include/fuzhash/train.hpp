#ifndef FUZHASH_TRAIN_HPP
#define FUZHASH_TRAIN_HPP

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

#include "fuzhash/hash_binary.hpp"
#include "fuzhash/hash_fuzzy.hpp"
#include "fuzhash/loss.hpp"
#include "fuzhash/mlp.hpp"
#include "fuzhash/nadam.hpp"
#include "fuzhash/rng.hpp"

namespace fuzhash {

enum class InputMode { HASHES, RANDOM_STRINGS, SINGLE_HASH };

/// How network outputs in (0,1) are interpreted as circular fuzbits:
/// directly (valid since (0,1) is a subset of (-1,1]) or affinely mapped
/// to (-1,1) via 2y - 1.
enum class CircularEmbedding { DIRECT, AFFINE };

struct TrainConfig {
    int samples_per_epoch = 1024;
    int batch_size = 64;
    int epochs = 0;
    double learning_rate = 0.002;
    LossKind loss = LossKind::L1;
    double binarization_penalty_weight = 0.0;
    InputMode input_mode = InputMode::HASHES;
    std::string single_hash_hex;  // SINGLE_HASH mode
    bool fresh_samples_per_epoch = true;
    bool nesterov = true;
    double grad_clip = 0.0;  // 0 disables clipping
    CircularEmbedding circular_embedding = CircularEmbedding::DIRECT;

    void validate() const {
        if (samples_per_epoch < 1 || batch_size < 1 || epochs < 0)
            throw std::invalid_argument("TrainConfig: non-positive sizes");
        if (samples_per_epoch % batch_size != 0)
            throw std::invalid_argument("TrainConfig: batch_size must divide samples_per_epoch");
        if (binarization_penalty_weight < 0.0)
            throw std::invalid_argument("TrainConfig: penalty weight must be >= 0");
    }
};

/// Binds a model to a compiled fuzzy circuit and runs the training loop:
/// hash in, predicted fuzzy message out, fuzzy hash of the prediction
/// against the true hash.
class Trainer {
public:
    Trainer(Mlp& model, const HashSpec& spec, const MaskSpec& mask, int message_bits,
            TrainConfig cfg, uint64_t master_seed)
        : model_(model),
          spec_(spec),
          mask_(mask),
          message_bits_(message_bits),
          cfg_(std::move(cfg)),
          circuit_(cached_circuit(spec, static_cast<std::size_t>(message_bits))),
          opt_(model.params(),
               {cfg_.learning_rate, 0.9, 0.999, 1e-8, cfg_.nesterov}),
          train_rng_(derive_rng(master_seed, RngStream::TRAIN_DATA)) {
        cfg_.validate();
        mask_.validate(spec.effective_out_bits());
        if (model.config().input_size != spec.effective_out_bits())
            throw std::invalid_argument("Trainer: model input size != hash length");
        if (model.config().output_size != message_bits)
            throw std::invalid_argument("Trainer: model output size != message length");
        if (cfg_.input_mode == InputMode::SINGLE_HASH) {
            single_hash_ = BitVector::from_hex(cfg_.single_hash_hex);
            if (single_hash_.size() != static_cast<std::size_t>(spec.effective_out_bits()))
                throw std::invalid_argument("Trainer: single hash length mismatch");
        }
    }

    NadamOptimizer& optimizer() { return opt_; }

    /// One epoch; returns the mean per-batch loss.
    double train_epoch() {
        const int k = spec_.effective_out_bits();
        const int n = cfg_.batch_size;
        const int batches = cfg_.samples_per_epoch / n;
        if (!cfg_.fresh_samples_per_epoch && epoch_targets_.empty()) draw_epoch_targets();
        double epoch_loss = 0.0;
        int sample_index = 0;
        for (int b = 0; b < batches; ++b) {
            Eigen::MatrixXd x(k, n);
            std::vector<BitVector> targets(n);
            for (int col = 0; col < n; ++col, ++sample_index) {
                targets[col] = cfg_.fresh_samples_per_epoch ? draw_target()
                                                            : epoch_targets_[sample_index];
                for (int i = 0; i < k; ++i) x(i, col) = targets[col][i];
            }
            Eigen::MatrixXd y = model_.forward(x, true);
            Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(y.rows(), y.cols());
            double batch_loss = 0.0;
            std::vector<double> msg(message_bits_), mgrad(message_bits_);
            std::vector<double> hgrad(static_cast<std::size_t>(k));
            for (int col = 0; col < n; ++col) {
                for (int i = 0; i < message_bits_; ++i) msg[i] = embed(y(i, col));
                eval_.forward(circuit_->tape, msg);
                auto h_pred = eval_.output_values(circuit_->tape);
                batch_loss += loss_and_grad(cfg_.loss, targets[col], h_pred, mask_, hgrad,
                                            spec_.algebra);
                eval_.backward_seeded(circuit_->tape, hgrad);
                auto g = eval_.input_gradient(circuit_->tape);
                std::copy(g.begin(), g.end(), mgrad.begin());
                if (spec_.algebra == Algebra::UNIT)
                    batch_loss += binarization_penalty(msg, cfg_.binarization_penalty_weight, mgrad);
                double scale = embed_scale() / n;
                for (int i = 0; i < message_bits_; ++i) {
                    double gi = mgrad[i] * scale;
                    if (cfg_.grad_clip > 0.0)
                        gi = std::clamp(gi, -cfg_.grad_clip, cfg_.grad_clip);
                    dy(i, col) = gi;
                }
            }
            batch_loss /= n;
            model_.zero_grad();
            model_.backward(dy);
            opt_.step();
            epoch_loss += batch_loss;
        }
        return epoch_loss / batches;
    }

private:
    double embed(double y) const {
        if (spec_.algebra == Algebra::CIRCULAR &&
            cfg_.circular_embedding == CircularEmbedding::AFFINE)
            return 2.0 * y - 1.0;
        return y;
    }
    double embed_scale() const {
        return (spec_.algebra == Algebra::CIRCULAR &&
                cfg_.circular_embedding == CircularEmbedding::AFFINE)
                   ? 2.0
                   : 1.0;
    }

    BitVector draw_target() {
        switch (cfg_.input_mode) {
            case InputMode::HASHES:
                return binary_digest(spec_, random_bits(train_rng_, message_bits_));
            case InputMode::RANDOM_STRINGS:
                return random_bits(train_rng_, spec_.effective_out_bits());
            case InputMode::SINGLE_HASH:
                return single_hash_;
        }
        throw std::logic_error("Trainer: bad input mode");
    }

    void draw_epoch_targets() {
        epoch_targets_.reserve(cfg_.samples_per_epoch);
        for (int i = 0; i < cfg_.samples_per_epoch; ++i) epoch_targets_.push_back(draw_target());
    }

    Mlp& model_;
    HashSpec spec_;
    MaskSpec mask_;
    int message_bits_;
    TrainConfig cfg_;
    std::shared_ptr<const CompiledCircuit> circuit_;
    NadamOptimizer opt_;
    std::mt19937_64 train_rng_;
    TapeEval eval_;
    BitVector single_hash_;
    std::vector<BitVector> epoch_targets_;
};

}  // namespace fuzhash

#endif
