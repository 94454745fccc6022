#ifndef FUZHASH_NADAM_HPP
#define FUZHASH_NADAM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "fuzhash/mlp.hpp"

namespace fuzhash {

/// Nesterov Adam (Dozat's formulation). With parameters theta, gradient g
/// and step counter t (starting at 1):
///
///   m_t = b1 m_{t-1} + (1 - b1) g
///   v_t = b2 v_{t-1} + (1 - b2) g^2
///   mhat = m_t / (1 - b1^(t+1))
///   ghat = g   / (1 - b1^t)
///   vhat = v_t / (1 - b2^t)
///   theta -= lr (b1 mhat + (1 - b1) ghat) / (sqrt(vhat) + eps)
///
/// With nesterov=false the update is plain Adam (mhat = m_t / (1 - b1^t),
/// no ghat term).
class NadamOptimizer {
public:
    struct Options {
        double learning_rate = 0.002;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double eps = 1e-8;
        bool nesterov = true;
    };

    explicit NadamOptimizer(std::vector<Param*> params)
        : NadamOptimizer(std::move(params), Options{}) {}

    NadamOptimizer(std::vector<Param*> params, Options opt)
        : params_(std::move(params)), opt_(opt) {
        for (Param* p : params_) {
            m_.emplace_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
            v_.emplace_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
        }
    }

    const Options& options() const { return opt_; }
    long step_count() const { return t_; }

    void step() {
        ++t_;
        double b1 = opt_.beta1, b2 = opt_.beta2;
        double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        double bc1_next = 1.0 - std::pow(b1, static_cast<double>(t_ + 1));
        double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            const Eigen::MatrixXd& g = params_[i]->grad;
            if (!g.allFinite())
                throw std::runtime_error("nadam: non-finite gradient in " + params_[i]->name);
            m_[i] = b1 * m_[i] + (1.0 - b1) * g;
            v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseProduct(g);
            Eigen::ArrayXXd vhat = v_[i].array() / bc2;
            Eigen::ArrayXXd update;
            if (opt_.nesterov) {
                update = b1 * (m_[i].array() / bc1_next) + (1.0 - b1) * (g.array() / bc1);
            } else {
                update = m_[i].array() / bc1;
            }
            params_[i]->value.array() -= opt_.learning_rate * update / (vhat.sqrt() + opt_.eps);
        }
    }

    void save_state(std::ostream& os) const {
        os.write(reinterpret_cast<const char*>(&t_), sizeof(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            os.write(reinterpret_cast<const char*>(m_[i].data()),
                     static_cast<std::streamsize>(sizeof(double) * m_[i].size()));
            os.write(reinterpret_cast<const char*>(v_[i].data()),
                     static_cast<std::streamsize>(sizeof(double) * v_[i].size()));
        }
    }

    void load_state(std::istream& is) {
        is.read(reinterpret_cast<char*>(&t_), sizeof(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            is.read(reinterpret_cast<char*>(m_[i].data()),
                    static_cast<std::streamsize>(sizeof(double) * m_[i].size()));
            is.read(reinterpret_cast<char*>(v_[i].data()),
                    static_cast<std::streamsize>(sizeof(double) * v_[i].size()));
        }
        if (!is) throw std::runtime_error("nadam: truncated optimizer state");
    }

private:
    std::vector<Param*> params_;
    Options opt_;
    std::vector<Eigen::MatrixXd> m_, v_;
    long t_ = 0;
};

}  // namespace fuzhash

#endif
