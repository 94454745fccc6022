#ifndef FUZHASH_CTX_HPP
#define FUZHASH_CTX_HPP

#include <cmath>

#include "fuzhash/tape.hpp"

namespace fuzhash {

/// Immediate-evaluation context: fuzzy circuits built against it compute
/// plain doubles with no graph.
struct ScalarCtx {
    using val = double;
    val constant(double v) const { return v; }
    val add(val a, val b) const { return a + b; }
    val sub(val a, val b) const { return a - b; }
    val mul(val a, val b) const { return a * b; }
    val neg(val a) const { return -a; }
    val recip(val a) const { return 1.0 / a; }
    val exp_(val a) const { return std::exp(a); }
    val log_(val a) const { return Tape::eval_log(a); }
    val cos_(val a) const { return std::cos(a); }
    val sin_(val a) const { return std::sin(a); }
    val abs_(val a) const { return std::fabs(a); }
    val min_(val a, val b) const { return std::min(a, b); }
    val max_(val a, val b) const { return std::max(a, b); }
    val clamp01(val a) const { return Tape::eval_clamp01(a); }
    val sigmoid(val a) const { return Tape::eval_sigmoid(a); }
    val hardsig(val a) const { return Tape::eval_hardsig(a); }
    val elu(val a) const { return Tape::eval_elu(a); }
    val pow_(val a, double p) const { return std::pow(a, p); }
    val wrap2(val a) const { return Tape::eval_wrap2(a); }
};

/// Graph-building context: the same circuit code records tape nodes.
struct TapeCtx {
    using val = NodeId;
    Tape& tape;
    val constant(double v) const { return tape.constant(v); }
    val add(val a, val b) const { return tape.add(a, b); }
    val sub(val a, val b) const { return tape.sub(a, b); }
    val mul(val a, val b) const { return tape.mul(a, b); }
    val neg(val a) const { return tape.neg(a); }
    val recip(val a) const { return tape.recip(a); }
    val exp_(val a) const { return tape.exp_(a); }
    val log_(val a) const { return tape.log_(a); }
    val cos_(val a) const { return tape.cos_(a); }
    val sin_(val a) const { return tape.sin_(a); }
    val abs_(val a) const { return tape.abs_(a); }
    val min_(val a, val b) const { return tape.min_(a, b); }
    val max_(val a, val b) const { return tape.max_(a, b); }
    val clamp01(val a) const { return tape.clamp01(a); }
    val sigmoid(val a) const { return tape.sigmoid(a); }
    val hardsig(val a) const { return tape.hardsig(a); }
    val elu(val a) const { return tape.elu(a); }
    val pow_(val a, double p) const { return tape.pow_(a, p); }
    val wrap2(val a) const { return tape.wrap2(a); }
};

}  // namespace fuzhash

#endif
