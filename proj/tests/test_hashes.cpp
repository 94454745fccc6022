#include <catch_amalgamated.hpp>

#include <random>

#include "fuzhash/hash_binary.hpp"
#include "fuzhash/hash_fuzzy.hpp"
#include "fuzhash/rng.hpp"

using namespace fuzhash;

namespace {

HashSpec make(HashAlgorithm a, int rounds = -1) {
    HashSpec s;
    s.algorithm = a;
    s.rounds = rounds;
    return s;
}

std::string hex_of(const HashSpec& s, const std::string& ascii) {
    return binary_digest(s, BitVector::from_ascii(ascii)).to_hex();
}

}  // namespace

TEST_CASE("full-round digests match published test vectors") {
    CHECK(hex_of(make(HashAlgorithm::MD5), "") == "d41d8cd98f00b204e9800998ecf8427e");
    CHECK(hex_of(make(HashAlgorithm::MD5), "abc") == "900150983cd24fb0d6963f7d28e17f72");
    CHECK(hex_of(make(HashAlgorithm::MD5), "The quick brown fox jumps over the lazy dog") ==
          "9e107d9d372bb6826bd81d3542a419d6");
    CHECK(hex_of(make(HashAlgorithm::SHA1), "") == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
    CHECK(hex_of(make(HashAlgorithm::SHA1), "abc") ==
          "a9993e364706816aba3e25717850c26c9cd0d89d");
    CHECK(hex_of(make(HashAlgorithm::SHA2_256), "abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hex_of(make(HashAlgorithm::SHA2_256), "") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    HashSpec sha3 = make(HashAlgorithm::KECCAK1600);
    sha3.domain_byte = 0x06;
    CHECK(hex_of(sha3, "") == "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
    CHECK(hex_of(sha3, "abc") ==
          "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
    // original padding rule, distinguished only by the domain byte
    HashSpec kec = make(HashAlgorithm::KECCAK1600);
    kec.domain_byte = 0x01;
    CHECK(hex_of(kec, "") == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
}

TEST_CASE("two-round SHA1 worked example pins the bit conventions") {
    const std::string fox = "The quick brown fox jumps over the lazy dog.";
    CHECK(hex_of(make(HashAlgorithm::SHA1, 2), fox) ==
          "c30b13efe3eaa95cf28c25be8c25bf585c8dbeee");
    // LSB-first within bytes: message bit 5 of ASCII "T" (0x54) is 0,
    // digest bit 31 (top bit of the byte 0xef) is 1.
    BitVector msg = BitVector::from_ascii(fox);
    CHECK(msg[5] == 0);
    BitVector digest = binary_digest(make(HashAlgorithm::SHA1, 2), msg);
    CHECK(digest[31] == 1);
}

TEST_CASE("reduced rounds keep the final feed-forward unless disabled") {
    HashSpec with_ff = make(HashAlgorithm::SHA1, 2);
    HashSpec without = with_ff;
    without.keep_feedforward = false;
    BitVector msg = BitVector::from_ascii("abc");
    CHECK(binary_digest(with_ff, msg) != binary_digest(without, msg));
}

TEST_CASE("fuzzy digest of a binbit message rounds to the binary digest") {
    std::mt19937_64 rng(21);
    std::vector<HashSpec> specs;
    for (auto a : {HashAlgorithm::MD5, HashAlgorithm::SHA1, HashAlgorithm::SHA2_256,
                   HashAlgorithm::KECCAK1600})
        for (int r : {1, 2, -1}) specs.push_back(make(a, r));
    specs.push_back(make(HashAlgorithm::SHA1_ROUND_STATE));
    specs.push_back(make(HashAlgorithm::KECCAK200_PERM, 2));
    specs.push_back(make(HashAlgorithm::ADD_TOY));
    for (auto& spec : specs) {
        for (Algebra alg : {Algebra::UNIT, Algebra::CIRCULAR}) {
            spec.algebra = alg;
            int mb = spec.fixed_message_bits();
            for (int trial = 0; trial < 5; ++trial) {
                BitVector msg = random_bits(rng, mb > 0 ? mb : 64);
                BitVector want = binary_digest(spec, msg);
                FuzVector got = fuzzy_digest(spec, FuzVector::from_bits(msg, alg));
                REQUIRE(round_to_bin(got) == want);
            }
        }
    }
}

TEST_CASE("compiled circuit reproduces the scalar fuzzy digest") {
    HashSpec spec = make(HashAlgorithm::SHA1, 2);
    auto circuit = cached_circuit(spec, 64);
    CHECK(cached_circuit(spec, 64) == circuit);  // cache hit
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    TapeEval ev;
    for (int trial = 0; trial < 10; ++trial) {
        FuzVector msg;
        msg.algebra = Algebra::UNIT;
        for (int i = 0; i < 64; ++i) msg.values.push_back(d(rng));
        ev.forward(circuit->tape, msg.values);
        auto via_tape = ev.output_values(circuit->tape);
        auto direct = fuzzy_digest(spec, msg);
        REQUIRE(via_tape.size() == direct.size());
        for (std::size_t i = 0; i < direct.size(); ++i)
            CHECK_THAT(via_tape[i], Catch::Matchers::WithinRel(direct.values[i], 1e-12));
    }
}

TEST_CASE("20-round fuzzy SHA1 collapses a perturbed bit to 0.5") {
    HashSpec spec = make(HashAlgorithm::SHA1, 20);
    FuzVector msg = FuzVector::from_bits(
        BitVector::from_ascii("The quick brown fox jumps over the lazy dog."), Algebra::UNIT);
    msg.values[5] = 1e-12;
    FuzVector h = fuzzy_digest(spec, msg);
    CHECK_THAT(h.values[31], Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("sensitivity trace endpoints agree with the binary hash") {
    HashSpec spec = make(HashAlgorithm::SHA1, 2);
    BitVector msg = BitVector::from_ascii("The quick brown fox jumps over the lazy dog.");
    auto curve = fuzzy_sensitivity_trace(spec, msg, 5, 31, 21);
    REQUIRE(curve.size() == 21);
    CHECK(curve.front().second == 1.0);
    CHECK(curve.back().second == 1.0);
    bool nonlinear = false;
    for (auto [m, h] : curve)
        if (std::fabs(h - 1.0) > 0.01) nonlinear = true;
    CHECK(nonlinear);
    CHECK_THROWS_AS(fuzzy_sensitivity_trace(spec, msg, 9999, 0, 11), std::out_of_range);
    CHECK_THROWS_AS(fuzzy_sensitivity_trace(spec, msg, 0, 9999, 11), std::out_of_range);
}

TEST_CASE("weakenings change the function but preserve fuzzy consistency") {
    std::mt19937_64 rng(23);
    BitVector msg = random_bits(rng, 64);
    HashSpec base = make(HashAlgorithm::SHA1, 2);

    HashSpec addxor = base;
    addxor.add_as_xor = true;
    CHECK(binary_digest(addxor, msg) != binary_digest(base, msg));

    HashSpec constants = base;
    constants.constants_override = regular_constants_preset(HashAlgorithm::SHA1);
    CHECK(binary_digest(constants, msg) != binary_digest(base, msg));

    // replacing OR with XOR in the Ch combiner is a boolean identity, so
    // binary digests agree; the relaxation only shows up on fuzzy values
    HashSpec pxor = make(HashAlgorithm::SHA2_256, 2);
    pxor.sha2_p_xor = true;
    CHECK(binary_digest(pxor, msg) == binary_digest(make(HashAlgorithm::SHA2_256, 2), msg));
    FuzVector soft = FuzVector::from_bits(msg, Algebra::UNIT);
    for (auto& x : soft.values) x = 0.25 + 0.5 * x;
    bool fuzzy_differs = false;
    FuzVector fp = fuzzy_digest(pxor, soft);
    FuzVector fb = fuzzy_digest(make(HashAlgorithm::SHA2_256, 2), soft);
    for (std::size_t i = 0; i < fp.values.size(); ++i)
        if (std::fabs(fp.values[i] - fb.values[i]) > 1e-9) fuzzy_differs = true;
    CHECK(fuzzy_differs);

    HashSpec notheta = make(HashAlgorithm::KECCAK1600, 2);
    notheta.step_mask = STEP_RHO | STEP_PI | STEP_CHI | STEP_IOTA;
    CHECK(binary_digest(notheta, msg) != binary_digest(make(HashAlgorithm::KECCAK1600, 2), msg));

    for (const HashSpec& s : {addxor, constants, pxor, notheta}) {
        FuzVector fd = fuzzy_digest(s, FuzVector::from_bits(msg, Algebra::UNIT));
        CHECK(round_to_bin(fd) == binary_digest(s, msg));
    }
}

TEST_CASE("special targets have the documented shapes") {
    std::mt19937_64 rng(24);
    // 64-bit toy input: output is the 32-bit sum of the two halves
    BitVector msg = random_bits(rng, 64);
    uint64_t m = 0;
    for (int i = 0; i < 64; ++i)
        if (msg[i]) m |= 1ull << i;
    uint32_t want = static_cast<uint32_t>(m) + static_cast<uint32_t>(m >> 32);
    BitVector sum = binary_digest(make(HashAlgorithm::ADD_TOY), msg);
    REQUIRE(sum.size() == 32);
    for (int i = 0; i < 32; ++i) CHECK(sum[i] == ((want >> i) & 1u));

    // round-state transform: 192 bits in (state + message word), 160 out
    BitVector state = random_bits(rng, 192);
    BitVector out = binary_digest(make(HashAlgorithm::SHA1_ROUND_STATE), state);
    CHECK(out.size() == 160);

    // f[200] permutation: 200 bits in, 200 out, bijective on its input
    BitVector s200 = random_bits(rng, 200);
    BitVector p1 = binary_digest(make(HashAlgorithm::KECCAK200_PERM, 1), s200);
    CHECK(p1.size() == 200);
    CHECK(p1 != s200);
}

TEST_CASE("spec JSON round-trips and rejects nonsense") {
    HashSpec s = make(HashAlgorithm::KECCAK1600, 2);
    s.out_bits = 128;
    s.algebra = Algebra::CIRCULAR;
    s.step_mask = STEP_THETA | STEP_CHI;
    s.domain_byte = 0x06;
    HashSpec back = spec_from_json(to_json(s));
    CHECK(to_json(back).dump() == to_json(s).dump());

    CHECK_THROWS_AS(spec_from_json({{"algorithm", "sha1"}, {"bogus", 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json({{"algorithm", "sha1"}, {"rounds", 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json({{"algorithm", "sha1"}, {"rounds", 81}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json({{"algorithm", "keccak1600"}, {"rate", 100}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(spec_from_json({{"algorithm", "keccak1600"}, {"out_bits", 1600}}),
                    std::invalid_argument);
}

TEST_CASE("messages of non-block lengths pad correctly") {
    // cross-check block boundaries against the full-round vectors computed
    // from 55/56/64-byte messages (padding straddles the block edge)
    std::string s55(55, 'a'), s56(56, 'a'), s64(64, 'a');
    CHECK(hex_of(make(HashAlgorithm::SHA1), s55) ==
          "c1c8bbdc22796e28c0e15163d20899b65621d65a");
    CHECK(hex_of(make(HashAlgorithm::SHA1), s56) ==
          "c2db330f6083854c99d4b5bfb6e8f29f201be699");
    CHECK(hex_of(make(HashAlgorithm::SHA1), s64) ==
          "0098ba824b5c16427bd7a1122a5a442a25ec644d");
    CHECK(hex_of(make(HashAlgorithm::MD5), s64) == "014842d480b571495a4a0363793f7367");
}
