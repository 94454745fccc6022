#ifndef FUZHASH_TAPE_HPP
#define FUZHASH_TAPE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuzhash {

enum class NodeKind : uint8_t {
    CONST, INPUT, ADD, SUB, MUL, NEG, RECIP, EXP, LOG, COS, SIN,
    ABS, MIN, MAX, CLAMP01, SIGMOID, HARDSIG, ELU, POW, WRAP2
};

using NodeId = uint32_t;

struct Node {
    NodeKind kind;
    NodeId a = 0;
    NodeId b = 0;
    double p = 0.0;  // CONST: the value; POW: the exponent
};

/// Append-only scalar computation graph. Insertion order is topological
/// order: a node may only reference nodes with smaller indices. A tape is
/// built once and then evaluated many times; the builder folds operations
/// on constants eagerly and applies a few exact identities (x+0, x*1, x*0)
/// so that circuits over mostly-constant bit strings stay small.
class Tape {
public:
    NodeId input() {
        NodeId id = push({NodeKind::INPUT});
        inputs_.push_back(id);
        return id;
    }

    NodeId constant(double v) {
        auto it = const_pool_.find(v);
        if (it != const_pool_.end()) return it->second;
        NodeId id = push({NodeKind::CONST, 0, 0, v});
        const_pool_.emplace(v, id);
        return id;
    }

    NodeId add(NodeId a, NodeId b) {
        if (is_const(a) && is_const(b)) return constant(cval(a) + cval(b));
        if (is_const(a) && cval(a) == 0.0) return b;
        if (is_const(b) && cval(b) == 0.0) return a;
        return push({NodeKind::ADD, a, b});
    }
    NodeId sub(NodeId a, NodeId b) {
        if (is_const(a) && is_const(b)) return constant(cval(a) - cval(b));
        if (is_const(b) && cval(b) == 0.0) return a;
        return push({NodeKind::SUB, a, b});
    }
    NodeId mul(NodeId a, NodeId b) {
        if (is_const(a) && is_const(b)) return constant(cval(a) * cval(b));
        if (is_const(a)) std::swap(a, b);
        if (is_const(b)) {
            if (cval(b) == 0.0) return constant(0.0);
            if (cval(b) == 1.0) return a;
        }
        return push({NodeKind::MUL, a, b});
    }
    NodeId neg(NodeId a) { return unary(NodeKind::NEG, a, [](double x) { return -x; }); }
    NodeId recip(NodeId a) { return unary(NodeKind::RECIP, a, [](double x) { return 1.0 / x; }); }
    NodeId exp_(NodeId a) { return unary(NodeKind::EXP, a, [](double x) { return std::exp(x); }); }
    NodeId log_(NodeId a) { return unary(NodeKind::LOG, a, &eval_log); }
    NodeId cos_(NodeId a) { return unary(NodeKind::COS, a, [](double x) { return std::cos(x); }); }
    NodeId sin_(NodeId a) { return unary(NodeKind::SIN, a, [](double x) { return std::sin(x); }); }
    NodeId abs_(NodeId a) { return unary(NodeKind::ABS, a, [](double x) { return std::fabs(x); }); }
    NodeId min_(NodeId a, NodeId b) {
        if (is_const(a) && is_const(b)) return constant(std::min(cval(a), cval(b)));
        return push({NodeKind::MIN, a, b});
    }
    NodeId max_(NodeId a, NodeId b) {
        if (is_const(a) && is_const(b)) return constant(std::max(cval(a), cval(b)));
        return push({NodeKind::MAX, a, b});
    }
    NodeId clamp01(NodeId a) { return unary(NodeKind::CLAMP01, a, &eval_clamp01); }
    NodeId sigmoid(NodeId a) { return unary(NodeKind::SIGMOID, a, &eval_sigmoid); }
    NodeId hardsig(NodeId a) { return unary(NodeKind::HARDSIG, a, &eval_hardsig); }
    NodeId elu(NodeId a) { return unary(NodeKind::ELU, a, &eval_elu); }
    NodeId pow_(NodeId a, double p) {
        if (is_const(a)) return constant(std::pow(cval(a), p));
        return push({NodeKind::POW, a, 0, p});
    }
    NodeId wrap2(NodeId a) { return unary(NodeKind::WRAP2, a, &eval_wrap2); }

    void mark_output(NodeId id) { outputs_.push_back(id); }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<NodeId>& inputs() const { return inputs_; }
    const std::vector<NodeId>& outputs() const { return outputs_; }

    bool is_const(NodeId id) const { return nodes_[id].kind == NodeKind::CONST; }
    double cval(NodeId id) const { return nodes_[id].p; }

    /// Text listing for inspection (format not stable).
    std::string dump() const {
        static const char* names[] = {"CONST", "INPUT", "ADD", "SUB", "MUL", "NEG", "RECIP",
                                      "EXP", "LOG", "COS", "SIN", "ABS", "MIN", "MAX",
                                      "CLAMP01", "SIGMOID", "HARDSIG", "ELU", "POW", "WRAP2"};
        std::ostringstream os;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Node& n = nodes_[i];
            os << i << "\t" << names[static_cast<int>(n.kind)];
            if (n.kind == NodeKind::CONST) os << "\t" << n.p;
            else if (n.kind != NodeKind::INPUT) {
                os << "\t" << n.a;
                if (is_binary(n.kind)) os << "," << n.b;
                if (n.kind == NodeKind::POW) os << "\tp=" << n.p;
            }
            os << "\n";
        }
        return os.str();
    }

    static bool is_binary(NodeKind k) {
        return k == NodeKind::ADD || k == NodeKind::SUB || k == NodeKind::MUL ||
               k == NodeKind::MIN || k == NodeKind::MAX;
    }

    static double eval_log(double x) { return std::log(std::max(x, 1e-12)); }
    static double eval_clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }
    static double eval_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
    static double eval_hardsig(double x) { return eval_clamp01(0.2 * x + 0.5); }
    static double eval_elu(double x) { return x >= 0.0 ? x : std::expm1(x); }
    static double eval_wrap2(double x) {
        double w = std::fmod(x, 2.0);
        if (w > 1.0) w -= 2.0;
        else if (w <= -1.0) w += 2.0;
        return w;
    }

private:
    template <class F>
    NodeId unary(NodeKind k, NodeId a, F f) {
        if (is_const(a)) return constant(f(cval(a)));
        return push({k, a});
    }

    NodeId push(Node n) {
        nodes_.push_back(n);
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    std::vector<Node> nodes_;
    std::vector<NodeId> inputs_;
    std::vector<NodeId> outputs_;
    std::map<double, NodeId> const_pool_;
};

/// Per-evaluation scratch state. One tape may be evaluated concurrently by
/// several TapeEval instances; a single instance is not thread-safe.
class TapeEval {
public:
    void forward(const Tape& t, std::span<const double> inputs, bool check_finite = false) {
        if (inputs.size() != t.inputs().size())
            throw std::invalid_argument("TapeEval: input count mismatch");
        const auto& nodes = t.nodes();
        value_.resize(nodes.size());
        std::size_t next_input = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Node& n = nodes[i];
            double v;
            switch (n.kind) {
                case NodeKind::CONST: v = n.p; break;
                case NodeKind::INPUT: v = inputs[next_input++]; break;
                case NodeKind::ADD: v = value_[n.a] + value_[n.b]; break;
                case NodeKind::SUB: v = value_[n.a] - value_[n.b]; break;
                case NodeKind::MUL: v = value_[n.a] * value_[n.b]; break;
                case NodeKind::NEG: v = -value_[n.a]; break;
                case NodeKind::RECIP: v = 1.0 / value_[n.a]; break;
                case NodeKind::EXP: v = std::exp(value_[n.a]); break;
                case NodeKind::LOG: v = Tape::eval_log(value_[n.a]); break;
                case NodeKind::COS: v = std::cos(value_[n.a]); break;
                case NodeKind::SIN: v = std::sin(value_[n.a]); break;
                case NodeKind::ABS: v = std::fabs(value_[n.a]); break;
                case NodeKind::MIN: v = std::min(value_[n.a], value_[n.b]); break;
                case NodeKind::MAX: v = std::max(value_[n.a], value_[n.b]); break;
                case NodeKind::CLAMP01: v = Tape::eval_clamp01(value_[n.a]); break;
                case NodeKind::SIGMOID: v = Tape::eval_sigmoid(value_[n.a]); break;
                case NodeKind::HARDSIG: v = Tape::eval_hardsig(value_[n.a]); break;
                case NodeKind::ELU: v = Tape::eval_elu(value_[n.a]); break;
                case NodeKind::POW: v = std::pow(value_[n.a], n.p); break;
                case NodeKind::WRAP2: v = Tape::eval_wrap2(value_[n.a]); break;
                default: throw std::logic_error("TapeEval: unknown node kind");
            }
            if (check_finite && !std::isfinite(v))
                throw std::runtime_error("TapeEval: non-finite value at node " + std::to_string(i));
            value_[i] = v;
        }
    }

    double value(NodeId id) const { return value_[id]; }

    std::vector<double> output_values(const Tape& t) const {
        std::vector<double> out;
        out.reserve(t.outputs().size());
        for (NodeId id : t.outputs()) out.push_back(value_[id]);
        return out;
    }

    /// Reverse pass with one adjoint seed per marked output. forward() must
    /// have been run on the same tape first.
    void backward_seeded(const Tape& t, std::span<const double> out_adjoints) {
        if (out_adjoints.size() != t.outputs().size())
            throw std::invalid_argument("TapeEval: output adjoint count mismatch");
        const auto& nodes = t.nodes();
        adjoint_.assign(nodes.size(), 0.0);
        for (std::size_t j = 0; j < out_adjoints.size(); ++j)
            adjoint_[t.outputs()[j]] += out_adjoints[j];
        for (std::size_t ii = nodes.size(); ii-- > 0;) {
            double g = adjoint_[ii];
            if (g == 0.0) continue;
            const Node& n = nodes[ii];
            switch (n.kind) {
                case NodeKind::CONST:
                case NodeKind::INPUT: break;
                case NodeKind::ADD:
                    adjoint_[n.a] += g;
                    adjoint_[n.b] += g;
                    break;
                case NodeKind::SUB:
                    adjoint_[n.a] += g;
                    adjoint_[n.b] -= g;
                    break;
                case NodeKind::MUL:
                    adjoint_[n.a] += g * value_[n.b];
                    adjoint_[n.b] += g * value_[n.a];
                    break;
                case NodeKind::NEG: adjoint_[n.a] -= g; break;
                case NodeKind::RECIP:
                    adjoint_[n.a] -= g * value_[ii] * value_[ii];
                    break;
                case NodeKind::EXP: adjoint_[n.a] += g * value_[ii]; break;
                case NodeKind::LOG:
                    // guarded log: zero slope in the clamped region
                    if (value_[n.a] > 1e-12) adjoint_[n.a] += g / value_[n.a];
                    break;
                case NodeKind::COS: adjoint_[n.a] -= g * std::sin(value_[n.a]); break;
                case NodeKind::SIN: adjoint_[n.a] += g * std::cos(value_[n.a]); break;
                case NodeKind::ABS:
                    adjoint_[n.a] += (value_[n.a] > 0.0 ? g : -g);
                    break;
                case NodeKind::MIN:
                    adjoint_[value_[n.a] <= value_[n.b] ? n.a : n.b] += g;
                    break;
                case NodeKind::MAX:
                    adjoint_[value_[n.a] >= value_[n.b] ? n.a : n.b] += g;
                    break;
                case NodeKind::CLAMP01:
                    if (value_[n.a] > 0.0 && value_[n.a] < 1.0) adjoint_[n.a] += g;
                    break;
                case NodeKind::SIGMOID: {
                    double s = value_[ii];
                    adjoint_[n.a] += g * s * (1.0 - s);
                    break;
                }
                case NodeKind::HARDSIG: {
                    double x = value_[n.a];
                    if (x > -2.5 && x < 2.5) adjoint_[n.a] += 0.2 * g;
                    break;
                }
                case NodeKind::ELU:
                    adjoint_[n.a] += g * (value_[n.a] >= 0.0 ? 1.0 : std::exp(value_[n.a]));
                    break;
                case NodeKind::POW:
                    adjoint_[n.a] += g * n.p * std::pow(value_[n.a], n.p - 1.0);
                    break;
                case NodeKind::WRAP2: adjoint_[n.a] += g; break;
                default: throw std::logic_error("TapeEval: unknown node kind");
            }
        }
    }

    /// Gradient of a single marked output w.r.t. every INPUT node.
    std::vector<double> backward(const Tape& t, std::size_t output_index) {
        if (output_index >= t.outputs().size())
            throw std::invalid_argument("TapeEval: output index out of range");
        std::vector<double> seeds(t.outputs().size(), 0.0);
        seeds[output_index] = 1.0;
        backward_seeded(t, seeds);
        return input_gradient(t);
    }

    std::vector<double> input_gradient(const Tape& t) const {
        std::vector<double> g;
        g.reserve(t.inputs().size());
        for (NodeId id : t.inputs()) g.push_back(adjoint_[id]);
        return g;
    }

    double adjoint(NodeId id) const { return adjoint_[id]; }

private:
    std::vector<double> value_;
    std::vector<double> adjoint_;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    int skipped_kinks = 0;  // inputs where the FD interval straddled a branch change
    int checked = 0;
};

namespace detail {
/// Branch signature of all non-smooth nodes at the current point; two
/// forward passes with different signatures straddle a kink.
inline std::vector<int8_t> branch_signature(const Tape& t, const TapeEval& ev) {
    std::vector<int8_t> sig;
    const auto& nodes = t.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        switch (n.kind) {
            case NodeKind::ABS: sig.push_back(ev.value(n.a) > 0.0); break;
            case NodeKind::MIN: sig.push_back(ev.value(n.a) <= ev.value(n.b)); break;
            case NodeKind::MAX: sig.push_back(ev.value(n.a) >= ev.value(n.b)); break;
            case NodeKind::CLAMP01: {
                double x = ev.value(n.a);
                sig.push_back(x <= 0.0 ? 0 : (x >= 1.0 ? 2 : 1));
                break;
            }
            case NodeKind::HARDSIG: {
                double x = ev.value(n.a);
                sig.push_back(x <= -2.5 ? 0 : (x >= 2.5 ? 2 : 1));
                break;
            }
            case NodeKind::LOG: sig.push_back(ev.value(n.a) > 1e-12); break;
            case NodeKind::WRAP2: {
                double x = ev.value(n.a);
                sig.push_back(static_cast<int8_t>(std::floor((x + 1.0) / 2.0)));
                break;
            }
            default: break;
        }
    }
    return sig;
}
}  // namespace detail

/// Central finite differences vs. reverse mode, for one marked output.
/// Input dimensions whose +/-eps evaluations land on different branches of
/// a non-smooth node are skipped and counted.
inline GradCheckResult grad_check(const Tape& t, std::size_t output_index,
                                  std::span<const double> point, double eps = 1e-6) {
    TapeEval ev;
    ev.forward(t, point);
    std::vector<double> ad = ev.backward(t, output_index);
    std::vector<double> x(point.begin(), point.end());
    GradCheckResult res;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double saved = x[i];
        x[i] = saved + eps;
        ev.forward(t, x);
        double fp = ev.value(t.outputs()[output_index]);
        auto sig_p = detail::branch_signature(t, ev);
        x[i] = saved - eps;
        ev.forward(t, x);
        double fm = ev.value(t.outputs()[output_index]);
        auto sig_m = detail::branch_signature(t, ev);
        x[i] = saved;
        if (sig_p != sig_m) {
            ++res.skipped_kinks;
            continue;
        }
        double fd = (fp - fm) / (2.0 * eps);
        double err = std::fabs(fd - ad[i]) / std::max(1.0, std::fabs(fd));
        res.max_rel_error = std::max(res.max_rel_error, err);
        ++res.checked;
    }
    return res;
}

}  // namespace fuzhash

#endif
