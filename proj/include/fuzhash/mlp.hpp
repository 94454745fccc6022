#ifndef FUZHASH_MLP_HPP
#define FUZHASH_MLP_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuzhash {

enum class OutputActivation { SIGMOID, HARD_SIGMOID };

struct MlpConfig {
    int input_size = 0;
    std::vector<int> hidden_sizes;
    int output_size = 0;
    OutputActivation output_activation = OutputActivation::SIGMOID;
    bool batch_norm = true;
    bool bn_before_activation = false;  // default: affine -> ELU -> batch norm
    uint64_t init_seed = 0;

    void validate() const {
        if (input_size < 1 || output_size < 1)
            throw std::invalid_argument("MlpConfig: input/output sizes must be >= 1");
        for (int h : hidden_sizes)
            if (h < 1) throw std::invalid_argument("MlpConfig: hidden sizes must be >= 1");
    }
};

/// One trainable block with its gradient and optimizer moments.
struct Param {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    std::string name;

    void init(int rows, int cols, std::string n) {
        value = Eigen::MatrixXd::Zero(rows, cols);
        grad = Eigen::MatrixXd::Zero(rows, cols);
        name = std::move(n);
    }
};

/// Fully connected network, batch in columns. Hidden layers: affine ->
/// ELU -> batch norm (running-stat momentum 0.99, eps 1e-3); output layer:
/// affine -> sigmoid or hard sigmoid.
class Mlp {
public:
    static constexpr double kBnEps = 1e-3;
    static constexpr double kBnMomentum = 0.99;

    explicit Mlp(MlpConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        std::mt19937_64 rng(cfg_.init_seed);
        int in = cfg_.input_size;
        for (std::size_t l = 0; l < cfg_.hidden_sizes.size(); ++l) {
            int out = cfg_.hidden_sizes[l];
            layers_.emplace_back();
            auto& L = layers_.back();
            L.w.init(out, in, "hidden" + std::to_string(l) + ".w");
            L.b.init(out, 1, "hidden" + std::to_string(l) + ".b");
            glorot_fill(L.w.value, rng);
            if (cfg_.batch_norm) {
                L.gamma.init(out, 1, "hidden" + std::to_string(l) + ".gamma");
                L.beta.init(out, 1, "hidden" + std::to_string(l) + ".beta");
                L.gamma.value.setOnes();
                L.running_mean = Eigen::VectorXd::Zero(out);
                L.running_var = Eigen::VectorXd::Ones(out);
            }
            in = out;
        }
        out_w_.init(cfg_.output_size, in, "out.w");
        out_b_.init(cfg_.output_size, 1, "out.b");
        glorot_fill(out_w_.value, rng);
    }

    const MlpConfig& config() const { return cfg_; }

    /// Forward pass; `training` selects batch statistics (and caches the
    /// intermediates needed by backward) vs running statistics.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, bool training) {
        if (x.rows() != cfg_.input_size) throw std::invalid_argument("Mlp: input row mismatch");
        if (training && cfg_.batch_norm && x.cols() < 2)
            throw std::invalid_argument("Mlp: batch norm needs n >= 2 in training mode");
        training_ = training;
        Eigen::MatrixXd a = x;
        if (training) input_cache_ = x;
        for (auto& L : layers_) {
            Eigen::MatrixXd z = (L.w.value * a).colwise() + L.b.value.col(0);
            if (cfg_.batch_norm && cfg_.bn_before_activation) {
                z = bn_forward(L, z, training);
                if (training) L.act_in = z;
                a = elu(z);
            } else {
                if (training) L.act_in = z;
                a = elu(z);
                if (cfg_.batch_norm) a = bn_forward(L, a, training);
            }
            if (training) L.output = a;
        }
        Eigen::MatrixXd z = (out_w_.value * a).colwise() + out_b_.value.col(0);
        if (training) out_in_ = z;
        if (cfg_.output_activation == OutputActivation::SIGMOID)
            return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        return z.unaryExpr([](double v) {
            double h = 0.2 * v + 0.5;
            return h < 0.0 ? 0.0 : (h > 1.0 ? 1.0 : h);
        });
    }

    /// Accumulates parameter gradients from dL/d(output). forward() with
    /// training=true must precede on the same batch.
    void backward(const Eigen::MatrixXd& dout) {
        if (!training_) throw std::logic_error("Mlp: backward without a training forward");
        Eigen::MatrixXd dz;
        if (cfg_.output_activation == OutputActivation::SIGMOID) {
            Eigen::MatrixXd s = out_in_.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
            dz = dout.cwiseProduct(s.cwiseProduct((1.0 - s.array()).matrix()));
        } else {
            dz = dout.cwiseProduct(out_in_.unaryExpr(
                [](double v) { return (v > -2.5 && v < 2.5) ? 0.2 : 0.0; }));
        }
        const Eigen::MatrixXd& last = layers_.empty() ? input_cache_ : layers_.back().output;
        out_w_.grad += dz * last.transpose();
        out_b_.grad += dz.rowwise().sum();
        Eigen::MatrixXd da = out_w_.value.transpose() * dz;
        for (std::size_t li = layers_.size(); li-- > 0;) {
            auto& L = layers_[li];
            Eigen::MatrixXd dzl;
            if (cfg_.batch_norm && !cfg_.bn_before_activation) {
                da = bn_backward(L, da);
            }
            dzl = da.cwiseProduct(L.act_in.unaryExpr(
                [](double v) { return v >= 0.0 ? 1.0 : std::exp(v); }));
            if (cfg_.batch_norm && cfg_.bn_before_activation) {
                dzl = bn_backward(L, dzl);
            }
            const Eigen::MatrixXd& prev = li == 0 ? input_cache_ : layers_[li - 1].output;
            L.w.grad += dzl * prev.transpose();
            L.b.grad += dzl.rowwise().sum();
            if (li > 0) da = L.w.value.transpose() * dzl;
        }
    }

    void zero_grad() {
        for (Param* p : params()) p->grad.setZero();
    }

    std::vector<Param*> params() {
        std::vector<Param*> ps;
        for (auto& L : layers_) {
            ps.push_back(&L.w);
            ps.push_back(&L.b);
            if (cfg_.batch_norm) {
                ps.push_back(&L.gamma);
                ps.push_back(&L.beta);
            }
        }
        ps.push_back(&out_w_);
        ps.push_back(&out_b_);
        return ps;
    }

    // --- checkpoint serialization (raw little-endian doubles) ---

    void save_params(std::ostream& os) const {
        auto wmat = [&](const Eigen::MatrixXd& m) {
            os.write(reinterpret_cast<const char*>(m.data()),
                     static_cast<std::streamsize>(sizeof(double) * m.size()));
        };
        for (const auto& L : layers_) {
            wmat(L.w.value);
            wmat(L.b.value);
            if (cfg_.batch_norm) {
                wmat(L.gamma.value);
                wmat(L.beta.value);
                wmat(L.running_mean);
                wmat(L.running_var);
            }
        }
        wmat(out_w_.value);
        wmat(out_b_.value);
    }

    void load_params(std::istream& is) {
        auto rmat = [&](Eigen::MatrixXd& m) {
            is.read(reinterpret_cast<char*>(m.data()),
                    static_cast<std::streamsize>(sizeof(double) * m.size()));
        };
        auto rvec = [&](Eigen::VectorXd& m) {
            is.read(reinterpret_cast<char*>(m.data()),
                    static_cast<std::streamsize>(sizeof(double) * m.size()));
        };
        for (auto& L : layers_) {
            rmat(L.w.value);
            rmat(L.b.value);
            if (cfg_.batch_norm) {
                rmat(L.gamma.value);
                rmat(L.beta.value);
                rvec(L.running_mean);
                rvec(L.running_var);
            }
        }
        rmat(out_w_.value);
        rmat(out_b_.value);
        if (!is) throw std::runtime_error("Mlp: truncated checkpoint");
    }

private:
    struct Layer {
        Param w, b, gamma, beta;
        Eigen::VectorXd running_mean, running_var;
        // training caches
        Eigen::MatrixXd act_in;   // pre-activation
        Eigen::MatrixXd output;   // layer output fed to the next layer
        Eigen::MatrixXd bn_xhat;
        Eigen::VectorXd bn_inv_std;
    };

    static void glorot_fill(Eigen::MatrixXd& w, std::mt19937_64& rng) {
        double limit = std::sqrt(6.0 / (w.rows() + w.cols()));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
    }

    static Eigen::MatrixXd elu(const Eigen::MatrixXd& z) {
        return z.unaryExpr([](double v) { return v >= 0.0 ? v : std::expm1(v); });
    }

    Eigen::MatrixXd bn_forward(Layer& L, const Eigen::MatrixXd& x, bool training) {
        if (training) {
            Eigen::VectorXd mean = x.rowwise().mean();
            Eigen::MatrixXd centered = x.colwise() - mean;
            Eigen::VectorXd var = centered.array().square().matrix().rowwise().mean();
            L.bn_inv_std = (var.array() + kBnEps).rsqrt();
            L.bn_xhat = centered.array().colwise() * L.bn_inv_std.array();
            L.running_mean = kBnMomentum * L.running_mean + (1.0 - kBnMomentum) * mean;
            L.running_var = kBnMomentum * L.running_var + (1.0 - kBnMomentum) * var;
            return (L.bn_xhat.array().colwise() * L.gamma.value.col(0).array()).matrix().colwise() +
                   L.beta.value.col(0);
        }
        Eigen::VectorXd inv_std = (L.running_var.array() + kBnEps).rsqrt();
        Eigen::MatrixXd xhat =
            ((x.colwise() - L.running_mean).array().colwise() * inv_std.array()).matrix();
        return (xhat.array().colwise() * L.gamma.value.col(0).array()).matrix().colwise() +
               L.beta.value.col(0);
    }

    Eigen::MatrixXd bn_backward(Layer& L, const Eigen::MatrixXd& dy) {
        double n = static_cast<double>(dy.cols());
        L.gamma.grad += dy.cwiseProduct(L.bn_xhat).rowwise().sum();
        L.beta.grad += dy.rowwise().sum();
        Eigen::MatrixXd dxhat = dy.array().colwise() * L.gamma.value.col(0).array();
        Eigen::VectorXd sum_dxhat = dxhat.rowwise().sum();
        Eigen::VectorXd sum_dxhat_xhat = dxhat.cwiseProduct(L.bn_xhat).rowwise().sum();
        Eigen::ArrayXXd dx = dxhat.array() * n;
        dx = dx.colwise() - sum_dxhat.array();
        dx -= L.bn_xhat.array().colwise() * sum_dxhat_xhat.array();
        dx = dx.colwise() * (L.bn_inv_std.array() / n);
        return dx.matrix();
    }

    MlpConfig cfg_;
    std::vector<Layer> layers_;
    Param out_w_, out_b_;
    Eigen::MatrixXd input_cache_, out_in_;
    bool training_ = false;
};

}  // namespace fuzhash

#endif
