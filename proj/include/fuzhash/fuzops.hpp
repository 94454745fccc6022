#ifndef FUZHASH_FUZOPS_HPP
#define FUZHASH_FUZOPS_HPP

#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fuzhash/bits.hpp"
#include "fuzhash/ctx.hpp"
#include "fuzhash/variants.hpp"

namespace fuzhash {

/// Fuzzy bit operations over a generic evaluation context (immediate
/// doubles or tape nodes). The unit-algebra ops honor the variant set;
/// the circular ops are the fixed angle-arithmetic family.
template <class Ctx>
class FuzOps {
public:
    using val = typename Ctx::val;

    FuzOps(Ctx& ctx, Algebra algebra, OpVariantSet variants = {})
        : ctx_(ctx), alg_(algebra), v_(variants) {
        v_.validate();
    }

    Algebra algebra() const { return alg_; }
    const OpVariantSet& variants() const { return v_; }

    val c(double x) const { return ctx_.constant(x); }

    /// Embedding of a classical bit into the active algebra (0 -> 0, 1 -> 1
    /// in both; the circular point 1 is the angle pi).
    val binbit(int b) const { return c(b ? 1.0 : 0.0); }

    val fnot(val a) const {
        if (alg_ == Algebra::CIRCULAR) return ctx_.wrap2(ctx_.add(a, c(1.0)));
        switch (v_.not_variant) {
            case NotVariant::STD: return ctx_.sub(c(1.0), a);
            case NotVariant::SQUARE: {
                val s = ctx_.sub(c(1.0), a);
                return ctx_.mul(s, s);
            }
            case NotVariant::COS:
                return ctx_.cos_(ctx_.mul(c(std::numbers::pi / 2.0), a));
        }
        throw std::logic_error("fnot: bad variant");
    }

    val fand(val a, val b) const {
        if (alg_ == Algebra::CIRCULAR) return ctx_.mul(a, b);
        switch (v_.and_variant) {
            case AndVariant::PRODUCT: return ctx_.mul(a, b);
            case AndVariant::MIN: return ctx_.min_(a, b);
            case AndVariant::POWER: return ctx_.pow_(ctx_.mul(a, b), v_.p);
            case AndVariant::ASYM: return ctx_.mul(ctx_.mul(a, a), b);
        }
        throw std::logic_error("fand: bad variant");
    }

    val for_(val a, val b) const {
        if (alg_ == Algebra::CIRCULAR) return fnot(fand(fnot(a), fnot(b)));
        switch (v_.or_variant) {
            case OrVariant::PROBSUM:
                return ctx_.sub(ctx_.add(a, b), ctx_.mul(a, b));
            case OrVariant::MAX: return ctx_.max_(a, b);
            case OrVariant::SUBMIN:
                return ctx_.sub(ctx_.add(a, b), ctx_.min_(a, b));
            case OrVariant::CAPSUM: return ctx_.min_(ctx_.add(a, b), c(1.0));
        }
        throw std::logic_error("for_: bad variant");
    }

    val fxor(val a, val b) const {
        if (alg_ == Algebra::CIRCULAR) return ctx_.wrap2(ctx_.add(a, b));
        val r = fxor_raw(a, b);
        return v_.push_after_xor ? push(r) : r;
    }

    /// t(r) = 3r^2 - 2r^3: moves [0,1/2) toward 0 and (1/2,1] toward 1.
    val push(val r) const {
        val r2 = ctx_.mul(r, r);
        return ctx_.sub(ctx_.mul(c(3.0), r2), ctx_.mul(c(2.0), ctx_.mul(r2, r)));
    }

    /// One full-adder position: digit and carry-out.
    std::pair<val, val> adder(val a, val b, val cin) const {
        if (alg_ == Algebra::CIRCULAR) {
            // D = a XOR b XOR c, C = (a AND b) XOR ((a XOR b) AND c)
            val axb = ctx_.wrap2(ctx_.add(a, b));
            val d = ctx_.wrap2(ctx_.add(axb, cin));
            val carry = ctx_.wrap2(ctx_.add(ctx_.mul(a, b), ctx_.mul(axb, cin)));
            return {d, carry};
        }
        switch (v_.adder_variant) {
            case AdderVariant::IDENTITY_CARRY: {
                // D = (a XOR b) XOR c, C = (a + b + c - D)/2
                val d = fxor(fxor(a, b), cin);
                val s = ctx_.add(ctx_.add(a, b), cin);
                val carry = ctx_.mul(c(0.5), ctx_.sub(s, d));
                return {d, carry};
            }
            case AdderVariant::FULL_FUZZY: {
                val axb = fxor(a, b);
                val d = fxor(axb, cin);
                val carry = for_(fand(a, b), fand(axb, cin));
                return {d, carry};
            }
            case AdderVariant::COSINE: {
                // D = (1 - cos(pi (a+b+c)))/2, C = (a+b+c-D)/2
                val s = ctx_.add(ctx_.add(a, b), cin);
                val d = ctx_.mul(c(0.5),
                                 ctx_.sub(c(1.0), ctx_.cos_(ctx_.mul(c(std::numbers::pi), s))));
                val carry = ctx_.mul(c(0.5), ctx_.sub(s, d));
                return {d, carry};
            }
            case AdderVariant::CLAMP: {
                // C = min{max{a+b+c-1, 0}, 1}, D = a+b+c-2C
                val s = ctx_.add(ctx_.add(a, b), cin);
                val carry = ctx_.clamp01(ctx_.sub(s, c(1.0)));
                val d = ctx_.sub(s, ctx_.mul(c(2.0), carry));
                return {d, carry};
            }
        }
        throw std::logic_error("adder: bad variant");
    }

    /// Addition modulo 2^n of two little-endian fuzbit strings (index 0 is
    /// the lowest bit); the final carry is discarded.
    std::vector<val> add_mod2n(std::span<const val> a, std::span<const val> b) const {
        if (a.size() != b.size()) throw std::invalid_argument("add_mod2n: length mismatch");
        std::vector<val> s;
        s.reserve(a.size());
        val carry = binbit(0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto [d, cout] = adder(a[i], b[i], carry);
            if (alg_ == Algebra::UNIT && v_.push_after_add) d = push(d);
            s.push_back(d);
            carry = cout;
        }
        return s;
    }

private:
    val fxor_raw(val a, val b) const {
        switch (v_.xor_variant) {
            case XorVariant::BILINEAR:
                // a(1-b) + (1-a)b = a + b - 2ab
                return ctx_.sub(ctx_.add(a, b), ctx_.mul(c(2.0), ctx_.mul(a, b)));
            case XorVariant::NONASSOC: {
                val na = ctx_.sub(c(1.0), a);
                val nb = ctx_.sub(c(1.0), b);
                val lin = ctx_.add(ctx_.mul(a, nb), ctx_.mul(b, na));
                return ctx_.sub(lin, ctx_.mul(ctx_.mul(a, b), ctx_.mul(na, nb)));
            }
            case XorVariant::ABSPOW:
                return ctx_.pow_(ctx_.abs_(ctx_.sub(a, b)), v_.p);
            case XorVariant::TENT: {
                val s = ctx_.add(a, b);
                return ctx_.min_(s, ctx_.sub(c(2.0), s));
            }
            case XorVariant::SINE:
                return ctx_.sin_(ctx_.mul(c(std::numbers::pi / 2.0), ctx_.add(a, b)));
        }
        throw std::logic_error("fxor: bad variant");
    }

    Ctx& ctx_;
    Algebra alg_;
    OpVariantSet v_;
};

// --- plain-value convenience API with domain checking ---

inline void check_unit(double a, const char* who) {
    if (!(a >= 0.0 && a <= 1.0))
        throw std::domain_error(std::string(who) + ": operand outside [0,1]");
}
inline void check_circ(double a, const char* who) {
    if (!(a > -1.0 && a <= 1.0))
        throw std::domain_error(std::string(who) + ": operand outside (-1,1]");
}

namespace detail {
inline ScalarCtx scalar_ctx;
inline FuzOps<ScalarCtx> unit_ops(OpVariantSet v = {}) {
    return FuzOps<ScalarCtx>(scalar_ctx, Algebra::UNIT, v);
}
inline FuzOps<ScalarCtx> circ_ops() {
    return FuzOps<ScalarCtx>(scalar_ctx, Algebra::CIRCULAR);
}
}  // namespace detail

inline double fuz_not(double a, OpVariantSet v = {}) {
    check_unit(a, "fuz_not");
    return detail::unit_ops(v).fnot(a);
}
inline double fuz_and(double a, double b, OpVariantSet v = {}) {
    check_unit(a, "fuz_and");
    check_unit(b, "fuz_and");
    return detail::unit_ops(v).fand(a, b);
}
inline double fuz_or(double a, double b, OpVariantSet v = {}) {
    check_unit(a, "fuz_or");
    check_unit(b, "fuz_or");
    return detail::unit_ops(v).for_(a, b);
}
inline double fuz_xor(double a, double b, OpVariantSet v = {}) {
    check_unit(a, "fuz_xor");
    check_unit(b, "fuz_xor");
    return detail::unit_ops(v).fxor(a, b);
}
inline double push_transform(double r) {
    check_unit(r, "push_transform");
    return 3.0 * r * r - 2.0 * r * r * r;
}

inline std::vector<double> fuz_add(std::span<const double> a, std::span<const double> b,
                                   OpVariantSet v = {}) {
    for (double x : a) check_unit(x, "fuz_add");
    for (double x : b) check_unit(x, "fuz_add");
    return detail::unit_ops(v).add_mod2n(a, b);
}

inline double circ_not(double a) {
    check_circ(a, "circ_not");
    return detail::circ_ops().fnot(a);
}
inline double circ_and(double a, double b) {
    check_circ(a, "circ_and");
    check_circ(b, "circ_and");
    return a * b;
}
inline double circ_or(double a, double b) {
    check_circ(a, "circ_or");
    check_circ(b, "circ_or");
    return detail::circ_ops().for_(a, b);
}
inline double circ_xor(double a, double b) {
    check_circ(a, "circ_xor");
    check_circ(b, "circ_xor");
    return detail::circ_ops().fxor(a, b);
}
inline double circ_to_unit(double a) {
    check_circ(a, "circ_to_unit");
    return std::fabs(a);
}

/// Angular distance between two circular fuzbits.
inline double circ_distance(double a, double b) {
    return std::min({std::fabs(a - b), std::fabs(a - b + 2.0), std::fabs(b - a + 2.0)});
}

// --- fuzzy vectors, rounding, bit moves ---

struct FuzVector {
    std::vector<double> values;
    Algebra algebra = Algebra::UNIT;

    std::size_t size() const { return values.size(); }

    static FuzVector from_bits(const BitVector& b, Algebra alg = Algebra::UNIT) {
        FuzVector v;
        v.algebra = alg;
        v.values.reserve(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) v.values.push_back(b[i] ? 1.0 : 0.0);
        return v;
    }

    void check_domain() const {
        for (double x : values) {
            if (algebra == Algebra::UNIT) check_unit(x, "FuzVector");
            else check_circ(x, "FuzVector");
        }
    }
};

/// Bitwise rounding: unit fuzbits round up at exactly 0.5; circular fuzbits
/// go through |a| first.
inline BitVector round_to_bin(const FuzVector& v) {
    BitVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = v.algebra == Algebra::CIRCULAR ? std::fabs(v.values[i]) : v.values[i];
        out[i] = x >= 0.5 ? 1 : 0;
    }
    return out;
}

enum class PermKind { ROTR, SHL, SHR, LEBE, PERMUTE };

struct PermSpec {
    PermKind kind;
    std::size_t k = 0;  // shift/rotate amount
    std::size_t w = 0;  // word width in bits
    std::vector<std::size_t> indices;  // PERMUTE: out[i] = in[indices[i]]
};

/// Applies a "move bits" op per w-bit word of the vector. Word bit index 0
/// carries weight 2^0, so e.g. SHR on a word reads toward higher indices.
/// Vacated positions are filled with the zero value of the algebra.
template <class T>
std::vector<T> move_bits(std::span<const T> in, const PermSpec& p, T zero) {
    if (p.kind == PermKind::PERMUTE) {
        if (p.indices.size() != in.size())
            throw std::out_of_range("move_bits: permutation size mismatch");
        std::vector<T> out;
        out.reserve(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (p.indices[i] >= in.size()) throw std::out_of_range("move_bits: index out of range");
            out.push_back(in[p.indices[i]]);
        }
        return out;
    }
    if (p.w == 0 || in.size() % p.w != 0)
        throw std::out_of_range("move_bits: vector length not a multiple of word width");
    std::vector<T> out(in.size(), zero);
    for (std::size_t base = 0; base < in.size(); base += p.w) {
        for (std::size_t i = 0; i < p.w; ++i) {
            switch (p.kind) {
                case PermKind::ROTR: out[base + i] = in[base + (i + p.k) % p.w]; break;
                case PermKind::SHR:
                    if (i + p.k < p.w) out[base + i] = in[base + i + p.k];
                    break;
                case PermKind::SHL:
                    if (i >= p.k) out[base + i] = in[base + i - p.k];
                    break;
                case PermKind::LEBE: {
                    if (p.w % 8 != 0) throw std::out_of_range("move_bits: LEBE width not byte-aligned");
                    std::size_t j = i / 8, r = i % 8;
                    out[base + i] = in[base + (p.w / 8 - 1 - j) * 8 + r];
                    break;
                }
                default: break;
            }
        }
    }
    return out;
}

inline FuzVector move_bits(const FuzVector& v, const PermSpec& p) {
    FuzVector out;
    out.algebra = v.algebra;
    out.values = move_bits<double>(v.values, p, 0.0);
    return out;
}

}  // namespace fuzhash

#endif
