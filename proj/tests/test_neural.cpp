#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "fuzhash/mlp.hpp"
#include "fuzhash/nadam.hpp"

using namespace fuzhash;

namespace {

MlpConfig small_config(bool bn, bool bn_first = false) {
    MlpConfig c;
    c.input_size = 3;
    c.hidden_sizes = {4, 5};
    c.output_size = 2;
    c.batch_norm = bn;
    c.bn_before_activation = bn_first;
    c.init_seed = 99;
    return c;
}

Eigen::MatrixXd random_batch(int rows, int cols, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::MatrixXd x(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) x(r, c) = d(rng);
    return x;
}

}  // namespace

TEST_CASE("analytic parameter gradients match finite differences") {
    for (bool bn : {false, true}) {
        for (bool bn_first : {false, true}) {
            if (!bn && bn_first) continue;
            MlpConfig cfg = small_config(bn, bn_first);
            Mlp net(cfg);
            Eigen::MatrixXd x = random_batch(3, 8, 1);
            Eigen::MatrixXd w = random_batch(2, 8, 2);  // loss = sum(w .* y)
            auto loss = [&]() { return net.forward(x, true).cwiseProduct(w).sum(); };
            loss();
            net.zero_grad();
            net.backward(w);
            const double eps = 1e-6;
            for (Param* p : net.params()) {
                for (Eigen::Index i = 0; i < p->value.size(); ++i) {
                    double saved = p->value.data()[i];
                    p->value.data()[i] = saved + eps;
                    double up = loss();
                    p->value.data()[i] = saved - eps;
                    double dn = loss();
                    p->value.data()[i] = saved;
                    double fd = (up - dn) / (2.0 * eps);
                    INFO(p->name << "[" << i << "] bn=" << bn << " bn_first=" << bn_first);
                    CHECK_THAT(p->grad.data()[i],
                               Catch::Matchers::WithinAbs(fd, 1e-5) ||
                                   Catch::Matchers::WithinRel(fd, 1e-5));
                }
            }
        }
    }
}

TEST_CASE("batch norm standardizes training activations") {
    MlpConfig cfg = small_config(true);
    cfg.hidden_sizes = {16};
    cfg.output_size = 16;
    Mlp net(cfg);
    // identity readout: sigmoid(z) with z equal to the BN output, recovered
    // below through the logit
    for (Param* p : net.params()) {
        if (p->name == "out.w") p->value = Eigen::MatrixXd::Identity(16, 16);
        if (p->name == "out.b") p->value.setZero();
    }
    Eigen::MatrixXd y = net.forward(random_batch(3, 256, 3), true);
    Eigen::MatrixXd z = (y.array() / (1.0 - y.array())).log().matrix();
    CHECK(z.rowwise().mean().cwiseAbs().maxCoeff() < 1e-10);
    Eigen::VectorXd var = z.array().square().matrix().rowwise().mean();
    CHECK(var.maxCoeff() <= 1.0 + 1e-10);  // var/(var + eps) < 1
    CHECK(var.minCoeff() > 0.5);
}

TEST_CASE("inference uses running statistics and is batch-size independent") {
    MlpConfig cfg = small_config(true);
    Mlp net(cfg);
    for (int i = 0; i < 10; ++i) net.forward(random_batch(3, 32, 100 + i), true);
    Eigen::MatrixXd x = random_batch(3, 5, 42);
    Eigen::MatrixXd all = net.forward(x, false);
    for (int c = 0; c < 5; ++c) {
        Eigen::MatrixXd one = net.forward(x.col(c), false);
        CHECK((one - all.col(c)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(net.forward(x.col(0), true), std::invalid_argument);  // BN needs n >= 2
}

TEST_CASE("output activations stay in (0,1) / [0,1]") {
    MlpConfig cfg = small_config(false);
    Mlp sig(cfg);
    cfg.output_activation = OutputActivation::HARD_SIGMOID;
    Mlp hard(cfg);
    Eigen::MatrixXd x = 100.0 * random_batch(3, 16, 5);
    Eigen::MatrixXd ys = sig.forward(x, false);
    Eigen::MatrixXd yh = hard.forward(x, false);
    CHECK(ys.minCoeff() >= 0.0);
    CHECK(ys.maxCoeff() <= 1.0);
    CHECK(yh.minCoeff() >= 0.0);
    CHECK(yh.maxCoeff() <= 1.0);
    bool saturated = (yh.array() == 0.0).any() || (yh.array() == 1.0).any();
    CHECK(saturated);
}

TEST_CASE("weight init is deterministic in the seed") {
    Mlp a(small_config(true)), b(small_config(true));
    MlpConfig other = small_config(true);
    other.init_seed = 100;
    Mlp c(other);
    CHECK(a.params()[0]->value == b.params()[0]->value);
    CHECK(a.params()[0]->value != c.params()[0]->value);
}

TEST_CASE("parameter serialization round-trips") {
    Mlp a(small_config(true));
    a.forward(random_batch(3, 16, 7), true);  // move the running stats
    std::stringstream buf;
    a.save_params(buf);
    Mlp b(small_config(true));
    b.load_params(buf);
    Eigen::MatrixXd x = random_batch(3, 4, 8);
    CHECK(a.forward(x, false) == b.forward(x, false));
    std::stringstream truncated(buf.str().substr(0, 10));
    Mlp c(small_config(true));
    CHECK_THROWS_AS(c.load_params(truncated), std::runtime_error);
}

TEST_CASE("nesterov-adam step matches the hand-computed update") {
    Param p;
    p.init(1, 1, "w");
    p.grad(0, 0) = 1.0;
    NadamOptimizer::Options opt;
    NadamOptimizer nadam({&p}, opt);
    nadam.step();
    // t=1: m=0.1, v=0.001, mhat=m/(1-0.9^2), ghat=g/(1-0.9), vhat=v/(1-0.999)
    double mhat = 0.1 / (1.0 - 0.81);
    double ghat = 1.0 / 0.1;
    double update = 0.002 * (0.9 * mhat + 0.1 * ghat) / (std::sqrt(1.0) + 1e-8);
    CHECK_THAT(p.value(0, 0), Catch::Matchers::WithinRel(-update, 1e-14));
}

TEST_CASE("plain adam differs from the nesterov variant") {
    Param p1, p2;
    p1.init(1, 1, "w");
    p2.init(1, 1, "w");
    p1.grad(0, 0) = p2.grad(0, 0) = 1.0;
    NadamOptimizer::Options nes, ad;
    ad.nesterov = false;
    NadamOptimizer o1({&p1}, nes), o2({&p2}, ad);
    o1.step();
    o2.step();
    CHECK(p1.value(0, 0) != p2.value(0, 0));
    // adam t=1: update = lr * (m/(1-b1)) / (sqrt(vhat)+eps) = lr * g / (1+eps)
    CHECK_THAT(p2.value(0, 0), Catch::Matchers::WithinRel(-0.002 / (1.0 + 1e-8), 1e-12));
}

TEST_CASE("optimizer state round-trips and rejects non-finite gradients") {
    Param p;
    p.init(2, 2, "w");
    NadamOptimizer a({&p});
    for (int i = 0; i < 3; ++i) {
        p.grad.setConstant(0.5);
        a.step();
    }
    std::stringstream buf;
    a.save_state(buf);
    Eigen::MatrixXd snapshot = p.value;
    p.grad.setConstant(0.25);
    a.step();
    Eigen::MatrixXd after = p.value;

    p.value = snapshot;
    NadamOptimizer b({&p});
    b.load_state(buf);
    CHECK(b.step_count() == 3);
    p.grad.setConstant(0.25);
    b.step();
    CHECK(p.value == after);

    p.grad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(b.step(), std::runtime_error);
}
