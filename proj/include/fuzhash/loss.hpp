#ifndef FUZHASH_LOSS_HPP
#define FUZHASH_LOSS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "fuzhash/bits.hpp"
#include "fuzhash/hashspec.hpp"
#include "fuzhash/variants.hpp"

namespace fuzhash {

enum class LossKind { L1, BCE, CIRCULAR_ANGULAR };

/// Mask-restricted loss between a binbit true hash and a fuzzy predicted
/// hash, together with dL/dh' (entries outside the mask stay zero).
inline double loss_and_grad(LossKind kind, const BitVector& h_true,
                            std::span<const double> h_pred, const MaskSpec& mask,
                            std::span<double> grad, Algebra algebra) {
    if (h_true.size() != h_pred.size() || grad.size() != h_pred.size())
        throw std::invalid_argument("loss: length mismatch");
    if (kind == LossKind::BCE && algebra != Algebra::UNIT)
        throw std::invalid_argument("loss: BCE requires the unit algebra");
    std::fill(grad.begin(), grad.end(), 0.0);
    double total = 0.0;
    const double km = static_cast<double>(mask.size());
    for (int j : mask.indices) {
        double h = h_true[static_cast<std::size_t>(j)];
        double hp = h_pred[static_cast<std::size_t>(j)];
        switch (kind) {
            case LossKind::L1: {
                double d = h - hp;
                total += std::fabs(d);
                grad[j] = d > 0.0 ? -1.0 : (d < 0.0 ? 1.0 : 0.0);
                break;
            }
            case LossKind::BCE: {
                double p = std::clamp(hp, 1e-12, 1.0 - 1e-12);
                total += -(h * std::log(p) + (1.0 - h) * std::log(1.0 - p)) / km;
                if (hp > 1e-12 && hp < 1.0 - 1e-12)
                    grad[j] = -(h / p - (1.0 - h) / (1.0 - p)) / km;
                break;
            }
            case LossKind::CIRCULAR_ANGULAR: {
                double c0 = std::fabs(h - hp);
                double c1 = std::fabs(h - hp + 2.0);
                double c2 = std::fabs(hp - h + 2.0);
                if (c0 <= c1 && c0 <= c2) {
                    total += c0;
                    grad[j] = (h - hp) > 0.0 ? -1.0 : ((h - hp) < 0.0 ? 1.0 : 0.0);
                } else if (c1 <= c2) {
                    total += c1;
                    grad[j] = (h - hp + 2.0) > 0.0 ? -1.0 : 1.0;
                } else {
                    total += c2;
                    grad[j] = (hp - h + 2.0) > 0.0 ? 1.0 : -1.0;
                }
                break;
            }
        }
    }
    return total;
}

/// Binarization penalty sum_i min(m'_i, 1 - m'_i); adds its gradient into
/// the message-gradient buffer. Unit algebra only.
inline double binarization_penalty(std::span<const double> msg, double lambda,
                                   std::span<double> grad_accum) {
    if (lambda == 0.0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < msg.size(); ++i) {
        double m = msg[i];
        total += lambda * std::min(m, 1.0 - m);
        grad_accum[i] += lambda * (m < 0.5 ? 1.0 : -1.0);
    }
    return total;
}

}  // namespace fuzhash

#endif
