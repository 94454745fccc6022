#include <catch_amalgamated.hpp>

#include <random>

#include "fuzhash/ctx.hpp"
#include "fuzhash/tape.hpp"

using namespace fuzhash;

TEST_CASE("constant folding keeps constant expressions out of the graph") {
    Tape t;
    NodeId a = t.constant(2.0);
    NodeId b = t.constant(3.0);
    NodeId s = t.add(a, b);
    CHECK(t.is_const(s));
    CHECK(t.cval(s) == 5.0);
    CHECK(t.constant(5.0) == s);  // pooled
    NodeId x = t.input();
    CHECK(t.add(x, t.constant(0.0)) == x);
    CHECK(t.mul(x, t.constant(1.0)) == x);
    CHECK(t.is_const(t.mul(x, t.constant(0.0))));
    CHECK(t.sub(x, t.constant(0.0)) == x);
    std::size_t before = t.size();
    t.exp_(t.constant(0.0));  // folds to 1.0, which is already pooled
    t.min_(t.constant(1.0), t.constant(2.0));
    CHECK(t.size() == before);
}

TEST_CASE("forward evaluation matches direct computation") {
    Tape t;
    NodeId x = t.input();
    NodeId y = t.input();
    // f = sin(x*y) + exp(x) - log(y) + |x - y| + x^3
    NodeId f = t.add(t.sin_(t.mul(x, y)), t.exp_(x));
    f = t.sub(f, t.log_(y));
    f = t.add(f, t.abs_(t.sub(x, y)));
    f = t.add(f, t.pow_(x, 3.0));
    t.mark_output(f);
    TapeEval ev;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.1, 2.0);
    for (int i = 0; i < 100; ++i) {
        double xv = d(rng), yv = d(rng);
        ev.forward(t, std::vector<double>{xv, yv});
        double want = std::sin(xv * yv) + std::exp(xv) - std::log(yv) + std::fabs(xv - yv) +
                      xv * xv * xv;
        CHECK_THAT(ev.output_values(t)[0], Catch::Matchers::WithinRel(want, 1e-14));
    }
}

TEST_CASE("reverse mode agrees with finite differences on a smooth composite") {
    Tape t;
    NodeId x = t.input();
    NodeId y = t.input();
    NodeId z = t.input();
    NodeId f = t.mul(t.sigmoid(t.add(x, t.mul(y, z))), t.cos_(t.sub(x, z)));
    f = t.add(f, t.elu(t.neg(y)));
    f = t.mul(f, t.recip(t.add(t.constant(2.0), t.exp_(z))));
    t.mark_output(f);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> p{d(rng), d(rng), d(rng)};
        auto res = grad_check(t, 0, p);
        CHECK(res.checked >= 2);
        CHECK(res.max_rel_error < 1e-6);
    }
}

TEST_CASE("grad_check skips finite-difference intervals that straddle kinks") {
    Tape t;
    NodeId x = t.input();
    t.mark_output(t.abs_(x));
    auto at_kink = grad_check(t, 0, std::vector<double>{1e-9});
    CHECK(at_kink.skipped_kinks == 1);
    CHECK(at_kink.checked == 0);
    auto away = grad_check(t, 0, std::vector<double>{0.5});
    CHECK(away.skipped_kinks == 0);
    CHECK_THAT(away.max_rel_error, Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("non-smooth nodes use one-sided subgradients") {
    Tape t;
    NodeId x = t.input();
    NodeId y = t.input();
    t.mark_output(t.min_(x, y));
    t.mark_output(t.max_(x, y));
    t.mark_output(t.clamp01(x));
    TapeEval ev;
    ev.forward(t, std::vector<double>{0.3, 0.8});
    auto g_min = ev.backward(t, 0);
    CHECK(g_min == std::vector<double>{1.0, 0.0});
    auto g_max = ev.backward(t, 1);
    CHECK(g_max == std::vector<double>{0.0, 1.0});
    auto g_clamp = ev.backward(t, 2);
    CHECK(g_clamp == std::vector<double>{1.0, 0.0});
    ev.forward(t, std::vector<double>{1.7, 0.8});
    g_clamp = ev.backward(t, 2);
    CHECK(g_clamp[0] == 0.0);  // saturated
}

TEST_CASE("wrap2 wraps into (-1,1] and has unit slope") {
    Tape t;
    NodeId x = t.input();
    t.mark_output(t.wrap2(x));
    TapeEval ev;
    for (double v : {0.0, 0.5, 1.0, 1.5, 2.0, -0.5, -1.0, -2.5, 3.25}) {
        ev.forward(t, std::vector<double>{v});
        double w = ev.output_values(t)[0];
        CHECK((w > -1.0 && w <= 1.0));
        CHECK_THAT(std::remainder(w - v, 2.0), Catch::Matchers::WithinAbs(0.0, 1e-12));
        auto g = ev.backward(t, 0);
        CHECK(g[0] == 1.0);
    }
}

TEST_CASE("guarded log clamps below 1e-12 with zero slope") {
    Tape t;
    NodeId x = t.input();
    t.mark_output(t.log_(x));
    TapeEval ev;
    ev.forward(t, std::vector<double>{1e-15});
    CHECK(ev.output_values(t)[0] == std::log(1e-12));
    CHECK(ev.backward(t, 0)[0] == 0.0);
    ev.forward(t, std::vector<double>{2.0});
    CHECK(ev.backward(t, 0)[0] == 0.5);
}

TEST_CASE("seeded backward accumulates multiple output adjoints") {
    Tape t;
    NodeId x = t.input();
    t.mark_output(t.mul(x, t.constant(3.0)));
    t.mark_output(t.mul(x, x));
    TapeEval ev;
    ev.forward(t, std::vector<double>{2.0});
    ev.backward_seeded(t, std::vector<double>{1.0, 10.0});
    // d/dx (3x) * 1 + d/dx (x^2) * 10 = 3 + 40
    CHECK(ev.input_gradient(t)[0] == 43.0);
}

TEST_CASE("TapeCtx and ScalarCtx compute the same values") {
    Tape t;
    TapeCtx tc{t};
    ScalarCtx sc;
    NodeId x = t.input();
    NodeId f = tc.min_(tc.sigmoid(x), tc.hardsig(tc.mul(x, tc.constant(0.7))));
    t.mark_output(f);
    TapeEval ev;
    for (double v : {-3.0, -0.2, 0.0, 0.4, 2.9}) {
        ev.forward(t, std::vector<double>{v});
        double want = sc.min_(sc.sigmoid(v), sc.hardsig(sc.mul(v, sc.constant(0.7))));
        CHECK(ev.output_values(t)[0] == want);
    }
}

TEST_CASE("forward rejects wrong input arity and can check finiteness") {
    Tape t;
    NodeId x = t.input();
    t.mark_output(t.recip(x));
    TapeEval ev;
    CHECK_THROWS_AS(ev.forward(t, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(ev.forward(t, std::vector<double>{0.0}, true), std::runtime_error);
    CHECK_NOTHROW(ev.forward(t, std::vector<double>{0.0}, false));
}
