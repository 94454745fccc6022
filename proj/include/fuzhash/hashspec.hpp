#ifndef FUZHASH_HASHSPEC_HPP
#define FUZHASH_HASHSPEC_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzhash/variants.hpp"

namespace fuzhash {

enum class HashAlgorithm {
    MD5, SHA1, SHA2_256, KECCAK1600, KECCAK200_PERM, SHA1_ROUND_STATE, ADD_TOY
};

/// Keccak step mappings, in canonical application order.
enum KeccakStep : unsigned {
    STEP_THETA = 1u << 0,
    STEP_RHO = 1u << 1,
    STEP_PI = 1u << 2,
    STEP_CHI = 1u << 3,
    STEP_IOTA = 1u << 4,
    STEP_ALL = 0x1fu
};

struct ConstantsOverride {
    std::vector<uint32_t> round_constants;  // K_i table (size per algorithm)
    std::vector<uint32_t> initial_state;    // H_i / IV words

    bool operator==(const ConstantsOverride&) const = default;
};

/// Full description of one target function: algorithm, round count,
/// weakenings, algebra and op variants. A spec plus a message length fully
/// determines both the exact and the fuzzy computation.
struct HashSpec {
    HashAlgorithm algorithm = HashAlgorithm::SHA1;
    int rounds = -1;           // -1: algorithm default
    int out_bits = -1;         // -1: algorithm default
    int rate = -1;             // Keccak only; -1: 1600 - capacity (or 1088)
    int capacity = -1;
    unsigned step_mask = STEP_ALL;  // Keccak only
    bool add_as_xor = false;
    bool keep_feedforward = true;   // MD/SHA final state ADD of the IV
    bool sha2_p_xor = false;        // XOR form of the SHA2 choice function
    std::optional<ConstantsOverride> constants_override;
    Algebra algebra = Algebra::UNIT;
    OpVariantSet variants;
    uint8_t domain_byte = 0x01;     // Keccak padding separator (0x06 = SHA3 style)

    static int default_rounds(HashAlgorithm a) {
        switch (a) {
            case HashAlgorithm::MD5: return 64;
            case HashAlgorithm::SHA1: return 80;
            case HashAlgorithm::SHA2_256: return 64;
            case HashAlgorithm::KECCAK1600: return 24;
            case HashAlgorithm::KECCAK200_PERM: return 18;
            case HashAlgorithm::SHA1_ROUND_STATE: return 1;
            case HashAlgorithm::ADD_TOY: return 1;
        }
        return 1;
    }

    static int default_out_bits(HashAlgorithm a) {
        switch (a) {
            case HashAlgorithm::MD5: return 128;
            case HashAlgorithm::SHA1: return 160;
            case HashAlgorithm::SHA2_256: return 256;
            case HashAlgorithm::KECCAK1600: return 256;
            case HashAlgorithm::KECCAK200_PERM: return 200;
            case HashAlgorithm::SHA1_ROUND_STATE: return 160;
            case HashAlgorithm::ADD_TOY: return 32;
        }
        return 0;
    }

    int effective_rounds() const { return rounds < 0 ? default_rounds(algorithm) : rounds; }
    int effective_out_bits() const {
        return out_bits < 0 ? default_out_bits(algorithm) : out_bits;
    }
    int state_width() const {
        return algorithm == HashAlgorithm::KECCAK200_PERM ? 200 : 1600;
    }
    int effective_capacity() const {
        if (capacity >= 0) return capacity;
        if (rate >= 0) return state_width() - rate;
        return 2 * effective_out_bits();  // Keccak-1600-h convention
    }
    int effective_rate() const { return state_width() - effective_capacity(); }

    void validate() const {
        variants.validate();
        int r = effective_rounds();
        if (r < 1) throw std::invalid_argument("HashSpec: rounds must be >= 1");
        if (r > default_rounds(algorithm))
            throw std::invalid_argument("HashSpec: rounds exceed the algorithm default");
        if (effective_out_bits() < 1) throw std::invalid_argument("HashSpec: out_bits must be >= 1");
        if (algorithm == HashAlgorithm::KECCAK1600) {
            if (effective_rate() + effective_capacity() != state_width())
                throw std::invalid_argument("HashSpec: rate + capacity must equal the state width");
            if (effective_rate() < 8 || effective_rate() % 8 != 0)
                throw std::invalid_argument("HashSpec: rate must be a positive multiple of 8");
            if (effective_out_bits() > effective_rate())
                throw std::invalid_argument("HashSpec: out_bits must not exceed the rate");
        }
    }

    /// Expected message (network output) length, or -1 when arbitrary.
    int fixed_message_bits() const {
        switch (algorithm) {
            case HashAlgorithm::SHA1_ROUND_STATE: return 192;
            case HashAlgorithm::KECCAK200_PERM: return 200;
            case HashAlgorithm::ADD_TOY: return 64;
            default: return -1;
        }
    }

    bool operator==(const HashSpec&) const = default;
};

/// Subset of hash-bit indices contributing to loss and miss counting.
struct MaskSpec {
    std::vector<int> indices;  // sorted, unique, 0-based

    static MaskSpec full(int out_bits) {
        MaskSpec m;
        m.indices.resize(out_bits);
        for (int i = 0; i < out_bits; ++i) m.indices[i] = i;
        return m;
    }

    static MaskSpec range(int first, int last) {  // inclusive
        MaskSpec m;
        for (int i = first; i <= last; ++i) m.indices.push_back(i);
        return m;
    }

    void validate(int out_bits) const {
        if (indices.empty()) throw std::invalid_argument("MaskSpec: mask must be non-empty");
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] < 0 || indices[i] >= out_bits)
                throw std::invalid_argument("MaskSpec: index out of range");
            if (i > 0 && indices[i] <= indices[i - 1])
                throw std::invalid_argument("MaskSpec: indices must be strictly increasing");
        }
    }

    std::size_t size() const { return indices.size(); }

    bool operator==(const MaskSpec&) const = default;
};

// --- JSON serialization (mirrors the struct fields) ---

inline std::string to_string(HashAlgorithm a) {
    switch (a) {
        case HashAlgorithm::MD5: return "md5";
        case HashAlgorithm::SHA1: return "sha1";
        case HashAlgorithm::SHA2_256: return "sha2-256";
        case HashAlgorithm::KECCAK1600: return "keccak1600";
        case HashAlgorithm::KECCAK200_PERM: return "keccak200-perm";
        case HashAlgorithm::SHA1_ROUND_STATE: return "sha1-round-state";
        case HashAlgorithm::ADD_TOY: return "add-toy";
    }
    return "?";
}

inline HashAlgorithm algorithm_from_string(const std::string& s) {
    if (s == "md5") return HashAlgorithm::MD5;
    if (s == "sha1") return HashAlgorithm::SHA1;
    if (s == "sha2-256" || s == "sha256") return HashAlgorithm::SHA2_256;
    if (s == "keccak1600" || s == "sha3") return HashAlgorithm::KECCAK1600;
    if (s == "keccak200-perm") return HashAlgorithm::KECCAK200_PERM;
    if (s == "sha1-round-state") return HashAlgorithm::SHA1_ROUND_STATE;
    if (s == "add-toy") return HashAlgorithm::ADD_TOY;
    throw std::invalid_argument("unknown algorithm: " + s);
}

namespace detail {
inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(known.begin(), known.end(),
                         [&](const char* k) { return it.key() == k; }))
            throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
    }
}
}  // namespace detail

inline nlohmann::json to_json(const OpVariantSet& v) {
    static const char* nots[] = {"std", "square", "cos"};
    static const char* ands[] = {"product", "min", "power", "asym"};
    static const char* ors[] = {"probsum", "max", "submin", "capsum"};
    static const char* xors[] = {"bilinear", "nonassoc", "abspow", "tent", "sine"};
    static const char* adders[] = {"identity-carry", "full-fuzzy", "cosine", "clamp"};
    return {{"not", nots[static_cast<int>(v.not_variant)]},
            {"and", ands[static_cast<int>(v.and_variant)]},
            {"or", ors[static_cast<int>(v.or_variant)]},
            {"xor", xors[static_cast<int>(v.xor_variant)]},
            {"adder", adders[static_cast<int>(v.adder_variant)]},
            {"push_after_xor", v.push_after_xor},
            {"push_after_add", v.push_after_add},
            {"p", v.p}};
}

inline OpVariantSet variants_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"not", "and", "or", "xor", "adder", "push_after_xor", "push_after_add", "p"},
        "variants");
    OpVariantSet v;
    auto idx = [](const nlohmann::json& j, const char* key, std::initializer_list<const char*> names,
                  int dflt) {
        if (!j.contains(key)) return dflt;
        std::string s = j.at(key).get<std::string>();
        int i = 0;
        for (const char* n : names) {
            if (s == n) return i;
            ++i;
        }
        throw std::invalid_argument(std::string("variants: unknown value '") + s + "' for " + key);
    };
    v.not_variant = static_cast<NotVariant>(idx(j, "not", {"std", "square", "cos"}, 0));
    v.and_variant = static_cast<AndVariant>(idx(j, "and", {"product", "min", "power", "asym"}, 0));
    v.or_variant = static_cast<OrVariant>(idx(j, "or", {"probsum", "max", "submin", "capsum"}, 0));
    v.xor_variant =
        static_cast<XorVariant>(idx(j, "xor", {"bilinear", "nonassoc", "abspow", "tent", "sine"}, 0));
    v.adder_variant = static_cast<AdderVariant>(
        idx(j, "adder", {"identity-carry", "full-fuzzy", "cosine", "clamp"}, 0));
    v.push_after_xor = j.value("push_after_xor", false);
    v.push_after_add = j.value("push_after_add", false);
    v.p = j.value("p", 2.0);
    v.validate();
    return v;
}

inline nlohmann::json to_json(const HashSpec& s) {
    nlohmann::json j{{"algorithm", to_string(s.algorithm)},
                     {"rounds", s.effective_rounds()},
                     {"out_bits", s.effective_out_bits()},
                     {"add_as_xor", s.add_as_xor},
                     {"keep_feedforward", s.keep_feedforward},
                     {"sha2_p_xor", s.sha2_p_xor},
                     {"algebra", s.algebra == Algebra::UNIT ? "unit" : "circular"},
                     {"variants", to_json(s.variants)}};
    if (s.algorithm == HashAlgorithm::KECCAK1600 || s.algorithm == HashAlgorithm::KECCAK200_PERM) {
        j["rate"] = s.effective_rate();
        j["capacity"] = s.effective_capacity();
        j["domain_byte"] = s.domain_byte;
        nlohmann::json steps = nlohmann::json::array();
        static const char* names[] = {"theta", "rho", "pi", "chi", "iota"};
        for (int i = 0; i < 5; ++i)
            if (s.step_mask & (1u << i)) steps.push_back(names[i]);
        j["steps"] = steps;
    }
    if (s.constants_override) {
        j["constants_override"] = {{"round_constants", s.constants_override->round_constants},
                                   {"initial_state", s.constants_override->initial_state}};
    }
    return j;
}

inline HashSpec spec_from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"algorithm", "rounds", "out_bits", "rate", "capacity", "steps",
                                 "add_as_xor", "keep_feedforward", "sha2_p_xor",
                                 "constants_override", "algebra", "variants", "domain_byte"},
                                "spec");
    HashSpec s;
    s.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    s.rounds = j.value("rounds", -1);
    s.out_bits = j.value("out_bits", -1);
    s.rate = j.value("rate", -1);
    s.capacity = j.value("capacity", -1);
    s.add_as_xor = j.value("add_as_xor", false);
    s.keep_feedforward = j.value("keep_feedforward", true);
    s.sha2_p_xor = j.value("sha2_p_xor", false);
    s.domain_byte = static_cast<uint8_t>(j.value("domain_byte", 0x01));
    if (j.contains("algebra")) {
        std::string a = j.at("algebra").get<std::string>();
        if (a == "unit") s.algebra = Algebra::UNIT;
        else if (a == "circular") s.algebra = Algebra::CIRCULAR;
        else throw std::invalid_argument("spec: unknown algebra '" + a + "'");
    }
    if (j.contains("variants")) s.variants = variants_from_json(j.at("variants"));
    if (j.contains("steps")) {
        s.step_mask = 0;
        for (const auto& st : j.at("steps")) {
            std::string n = st.get<std::string>();
            if (n == "theta") s.step_mask |= STEP_THETA;
            else if (n == "rho") s.step_mask |= STEP_RHO;
            else if (n == "pi") s.step_mask |= STEP_PI;
            else if (n == "chi") s.step_mask |= STEP_CHI;
            else if (n == "iota") s.step_mask |= STEP_IOTA;
            else throw std::invalid_argument("spec: unknown step '" + n + "'");
        }
    }
    if (j.contains("constants_override")) {
        const auto& c = j.at("constants_override");
        detail::reject_unknown_keys(c, {"round_constants", "initial_state"}, "constants_override");
        ConstantsOverride o;
        o.round_constants = c.value("round_constants", std::vector<uint32_t>{});
        o.initial_state = c.value("initial_state", std::vector<uint32_t>{});
        s.constants_override = std::move(o);
    }
    s.validate();
    return s;
}

/// "0x13131313-style" weakening preset for the MD/SHA family constants.
inline ConstantsOverride regular_constants_preset(HashAlgorithm a) {
    auto filled = [](std::size_t n, uint32_t v) { return std::vector<uint32_t>(n, v); };
    ConstantsOverride o;
    switch (a) {
        case HashAlgorithm::MD5:
            o.round_constants = filled(64, 0x13131313u);
            o.initial_state = filled(4, 0x13131313u);
            break;
        case HashAlgorithm::SHA1:
        case HashAlgorithm::SHA1_ROUND_STATE:
            o.round_constants = filled(4, 0x13131313u);
            o.initial_state = filled(5, 0x13131313u);
            break;
        case HashAlgorithm::SHA2_256:
            o.round_constants = filled(64, 0x13131313u);
            o.initial_state = filled(8, 0x13131313u);
            break;
        default:
            throw std::invalid_argument("constants preset: unsupported algorithm");
    }
    return o;
}

}  // namespace fuzhash

#endif
