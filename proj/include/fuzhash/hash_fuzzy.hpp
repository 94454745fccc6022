#ifndef FUZHASH_HASH_FUZZY_HPP
#define FUZHASH_HASH_FUZZY_HPP

#include <array>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "fuzhash/fuzops.hpp"
#include "fuzhash/hash_binary.hpp"
#include "fuzhash/hashspec.hpp"

namespace fuzhash {

/// The fuzzy evaluation of a HashSpec: the same circuit as the binary path
/// with every "change bits" op relaxed and every "move bits" op kept as an
/// index permutation. Instantiated with ScalarCtx for immediate values or
/// TapeCtx to record an autodiff graph.
template <class Ctx>
class FuzzyHash {
public:
    using val = typename Ctx::val;
    using Word = std::array<val, 32>;

    FuzzyHash(Ctx& ctx, const HashSpec& spec)
        : ctx_(ctx), ops_(ctx, spec.algebra, spec.variants), spec_(spec) {
        spec_.validate();
    }

    std::vector<val> digest(std::span<const val> msg) const {
        switch (spec_.algorithm) {
            case HashAlgorithm::MD5: return md5(msg);
            case HashAlgorithm::SHA1: return sha1(msg);
            case HashAlgorithm::SHA2_256: return sha2_256(msg);
            case HashAlgorithm::KECCAK1600: return keccak1600(msg);
            case HashAlgorithm::KECCAK200_PERM:
                return keccak_f(std::vector<val>(msg.begin(), msg.end()), 8);
            case HashAlgorithm::SHA1_ROUND_STATE: return sha1_round_state(msg);
            case HashAlgorithm::ADD_TOY: return add_toy(msg);
        }
        throw std::logic_error("FuzzyHash: unknown algorithm");
    }

private:
    val b0() const { return ops_.binbit(0); }

    Word word_from_u32(uint32_t w) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = ops_.binbit((w >> i) & 1u);
        return out;
    }
    // little-endian 32-bit word straight from the bit stream
    Word word_le(std::span<const val> bits, std::size_t off) const {
        Word w;
        for (int i = 0; i < 32; ++i) w[i] = bits[off + i];
        return w;
    }
    // big-endian word: the LEBE byte-order move
    Word word_be(std::span<const val> bits, std::size_t off) const {
        Word w;
        for (int byte = 0; byte < 4; ++byte)
            for (int i = 0; i < 8; ++i) w[8 * (3 - byte) + i] = bits[off + 8 * byte + i];
        return w;
    }
    void append_le(std::vector<val>& out, const Word& w) const {
        for (int i = 0; i < 32; ++i) out.push_back(w[i]);
    }
    void append_be(std::vector<val>& out, const Word& w) const {
        for (int byte = 3; byte >= 0; --byte)
            for (int i = 0; i < 8; ++i) out.push_back(w[8 * byte + i]);
    }

    Word word_xor(const Word& a, const Word& b) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = ops_.fxor(a[i], b[i]);
        return out;
    }
    Word word_and(const Word& a, const Word& b) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = ops_.fand(a[i], b[i]);
        return out;
    }
    Word word_or(const Word& a, const Word& b) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = ops_.for_(a[i], b[i]);
        return out;
    }
    Word word_not(const Word& a) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = ops_.fnot(a[i]);
        return out;
    }
    Word word_add(const Word& a, const Word& b) const {
        if (spec_.add_as_xor) return word_xor(a, b);
        auto s = ops_.add_mod2n(std::span<const val>(a.data(), 32),
                                std::span<const val>(b.data(), 32));
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = s[i];
        return out;
    }
    Word rotl(const Word& a, int n) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = a[(i - n % 32 + 32) % 32];
        return out;
    }
    Word rotr(const Word& a, int n) const { return rotl(a, 32 - n % 32); }
    Word shr(const Word& a, int n) const {
        Word out;
        for (int i = 0; i < 32; ++i) out[i] = i + n < 32 ? a[i + n] : b0();
        return out;
    }

    std::vector<val> padded_md(std::span<const val> msg, bool length_le) const {
        std::vector<val> bits(msg.begin(), msg.end());
        BitVector tail = md_padding_tail(msg.size(), length_le);
        for (std::size_t i = 0; i < tail.size(); ++i) bits.push_back(ops_.binbit(tail[i]));
        return bits;
    }

    std::vector<uint32_t> round_k(const std::vector<uint32_t>& dflt) const {
        if (spec_.constants_override && !spec_.constants_override->round_constants.empty())
            return spec_.constants_override->round_constants;
        return dflt;
    }
    std::vector<uint32_t> init_h(const std::vector<uint32_t>& dflt) const {
        if (spec_.constants_override && !spec_.constants_override->initial_state.empty())
            return spec_.constants_override->initial_state;
        return dflt;
    }

    std::vector<val> md5(std::span<const val> msg) const {
        auto K = round_k({tables::md5_k().begin(), tables::md5_k().end()});
        auto iv = init_h({tables::md5_iv.begin(), tables::md5_iv.end()});
        std::array<Word, 4> h;
        for (int i = 0; i < 4; ++i) h[i] = word_from_u32(iv[i]);
        auto bits = padded_md(msg, true);
        int rounds = spec_.effective_rounds();
        for (std::size_t off = 0; off < bits.size(); off += 512) {
            std::array<Word, 16> m;
            for (int i = 0; i < 16; ++i) m[i] = word_le(bits, off + 32 * i);
            Word a = h[0], b = h[1], c = h[2], d = h[3];
            for (int i = 0; i < rounds; ++i) {
                Word f;
                int g;
                if (i < 16) { f = word_or(word_and(b, c), word_and(word_not(b), d)); g = i; }
                else if (i < 32) { f = word_or(word_and(d, b), word_and(word_not(d), c)); g = (5 * i + 1) % 16; }
                else if (i < 48) { f = word_xor(word_xor(b, c), d); g = (3 * i + 5) % 16; }
                else { f = word_xor(c, word_or(b, word_not(d))); g = (7 * i) % 16; }
                Word t = word_add(word_add(word_add(a, f), word_from_u32(K[i])), m[g]);
                a = d; d = c; c = b;
                b = word_add(b, rotl(t, tables::md5_s()[i]));
            }
            if (spec_.keep_feedforward) {
                h[0] = word_add(h[0], a); h[1] = word_add(h[1], b);
                h[2] = word_add(h[2], c); h[3] = word_add(h[3], d);
            } else {
                h = {a, b, c, d};
            }
        }
        std::vector<val> out;
        for (const Word& w : h) append_le(out, w);
        return out;
    }

    std::vector<val> sha1(std::span<const val> msg) const {
        auto K = round_k({tables::sha1_k.begin(), tables::sha1_k.end()});
        auto iv = init_h({tables::sha1_iv.begin(), tables::sha1_iv.end()});
        std::array<Word, 5> h;
        for (int i = 0; i < 5; ++i) h[i] = word_from_u32(iv[i]);
        auto bits = padded_md(msg, false);
        int rounds = spec_.effective_rounds();
        for (std::size_t off = 0; off < bits.size(); off += 512) {
            std::vector<Word> w(std::max(rounds, 16));
            for (int i = 0; i < 16; ++i) w[i] = word_be(bits, off + 32 * i);
            for (int i = 16; i < rounds; ++i)
                w[i] = rotl(word_xor(word_xor(w[i - 3], w[i - 8]), word_xor(w[i - 14], w[i - 16])), 1);
            Word a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
            for (int i = 0; i < rounds; ++i) {
                Word f;
                if (i < 20) f = word_or(word_and(b, c), word_and(word_not(b), d));
                else if (i < 40) f = word_xor(word_xor(b, c), d);
                else if (i < 60) f = word_or(word_or(word_and(b, c), word_and(b, d)), word_and(c, d));
                else f = word_xor(word_xor(b, c), d);
                Word t = word_add(word_add(word_add(word_add(rotl(a, 5), f), e),
                                           word_from_u32(K[i / 20])),
                                  w[i]);
                e = d; d = c; c = rotl(b, 30); b = a; a = t;
            }
            if (spec_.keep_feedforward) {
                h[0] = word_add(h[0], a); h[1] = word_add(h[1], b); h[2] = word_add(h[2], c);
                h[3] = word_add(h[3], d); h[4] = word_add(h[4], e);
            } else {
                h = {a, b, c, d, e};
            }
        }
        std::vector<val> out;
        for (const Word& w : h) append_be(out, w);
        return out;
    }

    std::vector<val> sha2_256(std::span<const val> msg) const {
        auto K = round_k({tables::sha256_k().begin(), tables::sha256_k().end()});
        auto iv = init_h({tables::sha256_iv.begin(), tables::sha256_iv.end()});
        std::array<Word, 8> h;
        for (int i = 0; i < 8; ++i) h[i] = word_from_u32(iv[i]);
        auto bits = padded_md(msg, false);
        int rounds = spec_.effective_rounds();
        for (std::size_t off = 0; off < bits.size(); off += 512) {
            std::vector<Word> w(std::max(rounds, 16));
            for (int i = 0; i < 16; ++i) w[i] = word_be(bits, off + 32 * i);
            for (int i = 16; i < rounds; ++i) {
                Word s0 = word_xor(word_xor(rotr(w[i - 15], 7), rotr(w[i - 15], 18)), shr(w[i - 15], 3));
                Word s1 = word_xor(word_xor(rotr(w[i - 2], 17), rotr(w[i - 2], 19)), shr(w[i - 2], 10));
                w[i] = word_add(word_add(word_add(w[i - 16], s0), w[i - 7]), s1);
            }
            Word a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
            for (int i = 0; i < rounds; ++i) {
                Word s1 = word_xor(word_xor(rotr(e, 6), rotr(e, 11)), rotr(e, 25));
                Word ch = word_and(e, f);
                Word nch = word_and(word_not(e), g);
                Word p = spec_.sha2_p_xor ? word_xor(ch, nch) : word_or(ch, nch);
                Word t1 = word_add(word_add(word_add(word_add(hh, s1), p), word_from_u32(K[i])), w[i]);
                Word s0 = word_xor(word_xor(rotr(a, 2), rotr(a, 13)), rotr(a, 22));
                Word maj = word_xor(word_xor(word_and(a, b), word_and(a, c)), word_and(b, c));
                Word t2 = word_add(s0, maj);
                hh = g; g = f; f = e; e = word_add(d, t1);
                d = c; c = b; b = a; a = word_add(t1, t2);
            }
            if (spec_.keep_feedforward) {
                Word v[8] = {a, b, c, d, e, f, g, hh};
                for (int i = 0; i < 8; ++i) h[i] = word_add(h[i], v[i]);
            } else {
                h = {a, b, c, d, e, f, g, hh};
            }
        }
        std::vector<val> out;
        for (const Word& w : h) append_be(out, w);
        return out;
    }

    /// One Keccak-f pass on a fuzbit state (25 lanes of `lane_bits`),
    /// honoring the step mask; bit index = lane_bits*(5y+x) + z.
    std::vector<val> keccak_f(std::vector<val> a, int lane_bits) const {
        const int w = lane_bits;
        auto lane = [&](std::vector<val>& s, int x, int y, int z) -> val& {
            return s[w * (x + 5 * y) + z];
        };
        auto rho = tables::keccak_rho_offsets(w);
        auto rcs = tables::keccak_round_constants(w, spec_.effective_rounds());
        for (int ir = 0; ir < spec_.effective_rounds(); ++ir) {
            if (spec_.step_mask & STEP_THETA) {
                std::vector<val> c(5 * w), d(5 * w);
                for (int x = 0; x < 5; ++x)
                    for (int z = 0; z < w; ++z) {
                        val p = lane(a, x, 0, z);
                        for (int y = 1; y < 5; ++y) p = ops_.fxor(p, lane(a, x, y, z));
                        c[w * x + z] = p;
                    }
                for (int x = 0; x < 5; ++x)
                    for (int z = 0; z < w; ++z)
                        d[w * x + z] = ops_.fxor(c[w * ((x + 4) % 5) + z],
                                                 c[w * ((x + 1) % 5) + (z - 1 + w) % w]);
                for (int x = 0; x < 5; ++x)
                    for (int y = 0; y < 5; ++y)
                        for (int z = 0; z < w; ++z)
                            lane(a, x, y, z) = ops_.fxor(lane(a, x, y, z), d[w * x + z]);
            }
            if (spec_.step_mask & STEP_RHO) {
                std::vector<val> b = a;
                for (int i = 0; i < 25; ++i)
                    for (int z = 0; z < w; ++z)
                        a[w * i + z] = b[w * i + (z - rho[i] % w + w) % w];
            }
            if (spec_.step_mask & STEP_PI) {
                std::vector<val> b(a.size());
                for (int x = 0; x < 5; ++x)
                    for (int y = 0; y < 5; ++y)
                        for (int z = 0; z < w; ++z)
                            b[w * (x + 5 * y) + z] = a[w * ((x + 3 * y) % 5 + 5 * x) + z];
                a = std::move(b);
            }
            if (spec_.step_mask & STEP_CHI) {
                std::vector<val> b = a;
                for (int y = 0; y < 5; ++y)
                    for (int x = 0; x < 5; ++x)
                        for (int z = 0; z < w; ++z)
                            lane(a, x, y, z) =
                                ops_.fxor(lane(b, x, y, z),
                                          ops_.fand(ops_.fnot(lane(b, (x + 1) % 5, y, z)),
                                                    lane(b, (x + 2) % 5, y, z)));
            }
            if (spec_.step_mask & STEP_IOTA) {
                for (int z = 0; z < w; ++z)
                    if ((rcs[ir] >> z) & 1u) a[z] = ops_.fxor(a[z], ops_.binbit(1));
            }
        }
        return a;
    }

    std::vector<val> keccak1600(std::span<const val> msg) const {
        int rate = spec_.effective_rate();
        std::vector<val> bits(msg.begin(), msg.end());
        BitVector tail = keccak_padding_tail(msg.size(), rate, spec_.domain_byte);
        for (std::size_t i = 0; i < tail.size(); ++i) bits.push_back(ops_.binbit(tail[i]));
        std::vector<val> state(1600, b0());
        for (std::size_t off = 0; off < bits.size(); off += rate) {
            for (int i = 0; i < rate; ++i) state[i] = ops_.fxor(state[i], bits[off + i]);
            state = keccak_f(std::move(state), 64);
        }
        state.resize(spec_.effective_out_bits());
        return state;
    }

    std::vector<val> sha1_round_state(std::span<const val> input) const {
        if (input.size() != 192)
            throw std::invalid_argument("sha1_round_state: input must be 160+32 bits");
        std::array<Word, 5> s;
        for (int i = 0; i < 5; ++i) s[i] = word_le(input, 32 * i);
        Word w = word_le(input, 160);
        auto K = round_k({tables::sha1_k.begin(), tables::sha1_k.end()});
        Word f = word_or(word_and(s[1], s[2]), word_and(word_not(s[1]), s[3]));
        Word t = word_add(word_add(word_add(word_add(rotl(s[0], 5), f), s[4]),
                                   word_from_u32(K[0])),
                          w);
        std::vector<val> out;
        append_le(out, t);
        append_le(out, s[0]);
        append_le(out, rotl(s[1], 30));
        append_le(out, s[2]);
        append_le(out, s[3]);
        return out;
    }

    std::vector<val> add_toy(std::span<const val> msg) const {
        if (msg.size() != 64) throw std::invalid_argument("add-toy: message must be 64 bits");
        Word a = word_le(msg, 0), b = word_le(msg, 32);
        Word s = word_add(a, b);
        std::vector<val> out;
        append_le(out, s);
        return out;
    }

    Ctx& ctx_;
    FuzOps<Ctx> ops_;
    HashSpec spec_;
};

/// Immediate fuzzy digest of a fuzbit message.
inline FuzVector fuzzy_digest(const HashSpec& spec, const FuzVector& msg) {
    if (msg.algebra != spec.algebra)
        throw std::invalid_argument("fuzzy_digest: algebra mismatch between spec and message");
    msg.check_domain();
    ScalarCtx ctx;
    FuzzyHash<ScalarCtx> fh(ctx, spec);
    FuzVector out;
    out.algebra = spec.algebra;
    out.values = fh.digest(msg.values);
    return out;
}

/// A HashSpec compiled once into an autodiff tape over `message_bits`
/// inputs; reused across batches and epochs.
struct CompiledCircuit {
    Tape tape;
    std::size_t message_bits = 0;
    int out_bits = 0;
};

inline std::shared_ptr<const CompiledCircuit> compile_circuit(const HashSpec& spec,
                                                              std::size_t message_bits) {
    auto built = std::make_shared<CompiledCircuit>();
    built->message_bits = message_bits;
    built->out_bits = spec.effective_out_bits();
    TapeCtx ctx{built->tape};
    std::vector<NodeId> msg(message_bits);
    for (auto& m : msg) m = built->tape.input();
    FuzzyHash<TapeCtx> fh(ctx, spec);
    for (NodeId out : fh.digest(msg)) built->tape.mark_output(out);
    return built;
}

/// Process-wide circuit cache keyed by (spec, message length).
inline std::shared_ptr<const CompiledCircuit> cached_circuit(const HashSpec& spec,
                                                             std::size_t message_bits) {
    static std::mutex mu;
    static std::unordered_map<std::string, std::shared_ptr<const CompiledCircuit>> cache;
    std::string key = to_json(spec).dump() + "#" + std::to_string(message_bits);
    {
        std::lock_guard lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto built = compile_circuit(spec, message_bits);
    std::lock_guard lock(mu);
    return cache.try_emplace(key, std::move(built)).first->second;
}

/// Sweeps one message bit over its domain with the rest pinned to a binbit
/// message; returns (message bit value, hash bit value) samples.
inline std::vector<std::pair<double, double>> fuzzy_sensitivity_trace(
    const HashSpec& spec, const BitVector& msg, std::size_t msg_bit_index,
    std::size_t hash_bit_index, int samples) {
    if (msg_bit_index >= msg.size()) throw std::out_of_range("trace: message bit index");
    if (hash_bit_index >= static_cast<std::size_t>(spec.effective_out_bits()))
        throw std::out_of_range("trace: hash bit index");
    if (samples < 2) throw std::invalid_argument("trace: need at least 2 samples");
    FuzVector base = FuzVector::from_bits(msg, spec.algebra);
    double lo = spec.algebra == Algebra::UNIT ? 0.0 : -1.0 + 2.0 / samples;
    double hi = 1.0;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        double m = lo + (hi - lo) * i / (samples - 1);
        FuzVector probe = base;
        probe.values[msg_bit_index] = m;
        FuzVector h = fuzzy_digest(spec, probe);
        curve.emplace_back(m, h.values[hash_bit_index]);
    }
    return curve;
}

}  // namespace fuzhash

#endif
