#ifndef FUZHASH_VARIANTS_HPP
#define FUZHASH_VARIANTS_HPP

#include <stdexcept>

namespace fuzhash {

/// Which continuous domain the fuzzy bits live in.
enum class Algebra { UNIT, CIRCULAR };

enum class NotVariant { STD, SQUARE, COS };
enum class AndVariant { PRODUCT, MIN, POWER, ASYM };
enum class OrVariant { PROBSUM, MAX, SUBMIN, CAPSUM };
enum class XorVariant { BILINEAR, NONASSOC, ABSPOW, TENT, SINE };
enum class AdderVariant { IDENTITY_CARRY, FULL_FUZZY, COSINE, CLAMP };

/// Selection of one relaxation per op family. The defaults reproduce the
/// chosen ops: NOT(a)=1-a, AND=ab, OR=a+b-ab, XOR=a(1-b)+(1-a)b, and the
/// carry from the identity a+b+c = D+2C.
struct OpVariantSet {
    NotVariant not_variant = NotVariant::STD;
    AndVariant and_variant = AndVariant::PRODUCT;
    OrVariant or_variant = OrVariant::PROBSUM;
    XorVariant xor_variant = XorVariant::BILINEAR;
    AdderVariant adder_variant = AdderVariant::IDENTITY_CARRY;
    bool push_after_xor = false;
    bool push_after_add = false;  // worsens learning; off by default
    double p = 2.0;               // exponent for POWER / ABSPOW

    void validate() const {
        if (!(p > 0.0)) throw std::invalid_argument("OpVariantSet: p must be > 0");
    }

    bool operator==(const OpVariantSet&) const = default;
};

}  // namespace fuzhash

#endif
