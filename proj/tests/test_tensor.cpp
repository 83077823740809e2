#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "fd_check.hpp"
#include "semnav/optim.hpp"
#include "semnav/tensor.hpp"

using namespace semnav;
using namespace semnav::testutil;

TEST_CASE("factories and accessors") {
    Tensor z = Tensor::zeros(2, 3);
    CHECK(z.rows() == 2);
    CHECK(z.cols() == 3);
    CHECK(z.at(1, 2) == 0.0);

    Tensor v = Tensor::from_values(2, 2, {1, 2, 3, 4});
    CHECK(v.at(0, 1) == 2.0);
    CHECK(v.at(1, 0) == 3.0);

    CHECK(Tensor::row({1, 2, 3}).cols() == 3);
    CHECK(Tensor::column({1, 2, 3}).rows() == 3);
    CHECK(Tensor::scalar(7.0).item() == 7.0);
    CHECK_THROWS_AS(Tensor::from_values(2, 2, {1, 2, 3}), ShapeError);
    CHECK_THROWS_AS(Tensor::zeros(2, 3).item(), ContractError);
}

TEST_CASE("matmul forward values") {
    Tensor a = Tensor::from_values(2, 3, {1, 2, 3, 4, 5, 6});
    Tensor b = Tensor::from_values(3, 2, {7, 8, 9, 10, 11, 12});
    Tensor c = matmul(a, b);
    CHECK(c.at(0, 0) == doctest::Approx(58));
    CHECK(c.at(0, 1) == doctest::Approx(64));
    CHECK(c.at(1, 0) == doctest::Approx(139));
    CHECK(c.at(1, 1) == doctest::Approx(154));
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("softmax rows sum to one and are invariant to shifts") {
    Tensor x = Tensor::from_values(2, 3, {1, 2, 3, 1000, 1001, 1002});
    Tensor p = softmax(x);
    for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += p.at(i, j);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    // identical logit gaps -> identical probabilities, even at huge magnitude
    for (int j = 0; j < 3; ++j) CHECK(p.at(0, j) == doctest::Approx(p.at(1, j)).epsilon(1e-12));
    Tensor bad = Tensor::from_values(1, 2, {std::nan(""), 0.0});
    CHECK_THROWS_AS(softmax(bad), NumericError);
}

TEST_CASE("log_softmax matches log of softmax") {
    Rng rng(11);
    Tensor x = random_tensor(rng, 3, 5, false, -4, 4);
    Tensor ls = log_softmax(x);
    Tensor p = softmax(x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(ls.at(i, j) == doctest::Approx(std::log(p.at(i, j))).epsilon(1e-12));
}

TEST_CASE("gradients match finite differences on every op") {
    Rng rng(42);
    const int trials = 8;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 2 + trial % 3;
        int m = 3 + trial % 2;
        {
            Tensor a = random_tensor(rng, n, m, true);
            Tensor b = random_tensor(rng, m, n, true);
            auto rep = check_gradients([&] { return sum(matmul(a, b)); }, {a, b}, {"a", "b"});
            CHECK(rep.max_rel_err < 1e-4);
        }
        {
            Tensor a = random_tensor(rng, n, m, true);
            Tensor b = random_tensor(rng, n, m, true);
            Tensor w = random_tensor(rng, n, m, false);
            auto rep = check_gradients([&] { return sum(mul(add(a, b), w)); }, {a, b}, {"a", "b"});
            CHECK(rep.max_rel_err < 1e-4);
            rep = check_gradients([&] { return sum(mul(sub(a, b), w)); }, {a, b}, {"a", "b"});
            CHECK(rep.max_rel_err < 1e-4);
            rep = check_gradients([&] { return sum(mul(mul(a, b), w)); }, {a, b}, {"a", "b"});
            CHECK(rep.max_rel_err < 1e-4);
            rep = check_gradients([&] { return sum(mul(scale(a, -2.5), w)); }, {a}, {"a"});
            CHECK(rep.max_rel_err < 1e-4);
        }
        {
            Tensor a = random_tensor_off_kink(rng, n, m, true);
            Tensor w = random_tensor(rng, n, m, false);
            auto rep = check_gradients([&] { return sum(mul(relu(a), w)); }, {a}, {"a"});
            CHECK(rep.max_rel_err < 1e-4);
        }
        {
            Tensor m1 = random_tensor(rng, n, m, true);
            Tensor bias = random_tensor(rng, 1, m, true);
            Tensor w = random_tensor(rng, n, m, false);
            auto rep = check_gradients([&] { return sum(mul(add_row_bias(m1, bias), w)); },
                                       {m1, bias}, {"m", "bias"});
            CHECK(rep.max_rel_err < 1e-4);
        }
        {
            Tensor a = random_tensor(rng, n, m, true);
            Tensor b = random_tensor(rng, n, m, true);
            Tensor w0 = random_tensor(rng, 2 * n, m, false);
            auto rep = check_gradients([&] { return sum(mul(concat({a, b}, 0), w0)); }, {a, b},
                                       {"a", "b"});
            CHECK(rep.max_rel_err < 1e-4);
            Tensor w1 = random_tensor(rng, n, 2 * m, false);
            rep = check_gradients([&] { return sum(mul(concat({a, b}, 1), w1)); }, {a, b},
                                  {"a", "b"});
            CHECK(rep.max_rel_err < 1e-4);
        }
        {
            Tensor x = random_tensor(rng, n, m, true, -3, 3);
            Tensor w = random_tensor(rng, n, m, false);
            auto rep = check_gradients([&] { return sum(mul(softmax(x), w)); }, {x}, {"x"});
            CHECK(rep.max_rel_err < 1e-4);
            rep = check_gradients([&] { return sum(mul(log_softmax(x), w)); }, {x}, {"x"});
            CHECK(rep.max_rel_err < 1e-4);
        }
        {
            Tensor x = random_tensor(rng, n, m, true);
            auto rep = check_gradients([&] { return select(x, 1, 1); }, {x}, {"x"});
            CHECK(rep.max_rel_err < 1e-4);
            Tensor w = random_tensor(rng, m, n, false);
            rep = check_gradients([&] { return sum(mul(transpose(x), w)); }, {x}, {"x"});
            CHECK(rep.max_rel_err < 1e-4);
        }
    }
}

TEST_CASE("deep composition gradient") {
    Rng rng(7);
    Tensor x = random_tensor(rng, 1, 6, true);
    Tensor w1 = random_tensor(rng, 6, 5, true);
    Tensor b1 = random_tensor(rng, 1, 5, true);
    Tensor w2 = random_tensor(rng, 5, 4, true);
    auto build = [&] {
        Tensor h = relu(add_row_bias(matmul(x, w1), b1));
        Tensor logits = matmul(h, w2);
        Tensor logp = log_softmax(logits);
        return sub(scale(select(logp, 0, 2), -1.0), scale(sum(mul(softmax(logits), logp)), 0.01));
    };
    auto rep = check_gradients(build, {x, w1, b1, w2}, {"x", "w1", "b1", "w2"});
    CHECK(rep.max_rel_err < 1e-4);
}

TEST_CASE("leaf grads accumulate across backward calls, interior grads reset") {
    Tensor a = Tensor::from_values(1, 2, {1.0, 2.0}, true);
    Tensor s1 = sum(a);
    s1.backward();
    CHECK(a.grad()[0] == doctest::Approx(1.0));
    Tensor s2 = sum(scale(a, 3.0));
    s2.backward();
    CHECK(a.grad()[0] == doctest::Approx(4.0));  // 1 + 3
    a.zero_grad();
    // double backward on the same graph also accumulates into leaves
    Tensor inner = scale(a, 2.0);
    Tensor s3 = sum(inner);
    s3.backward();
    s3.backward();
    CHECK(a.grad()[0] == doctest::Approx(4.0));  // 2 + 2, interior grad reset per call
}

TEST_CASE("backward requires scalar and respects NoGradGuard") {
    Tensor a = Tensor::from_values(1, 2, {1.0, 2.0}, true);
    CHECK_THROWS_AS(scale(a, 2.0).backward(), ContractError);
    {
        NoGradGuard ng;
        Tensor s = sum(scale(a, 2.0));
        s.backward();  // no tape: a silently stays untouched
        CHECK(a.grad()[0] == 0.0);
    }
    CHECK(grad_enabled());
}

TEST_CASE("no-grad inputs keep the tape pruned") {
    Tensor a = Tensor::from_values(1, 2, {1.0, 2.0}, false);
    Tensor s = sum(scale(a, 2.0));
    s.backward();
    CHECK(a.grad()[0] == 0.0);
}

TEST_CASE("rmsprop closed form") {
    std::vector<double> p = {1.0, -2.0};
    std::vector<double> g = {0.5, 0.25};
    RmsPropState st;
    st.decay = 0.9;
    st.epsilon = 1e-8;
    st.learning_rate = 0.1;
    rmsprop_step(p, g, st);
    double acc0 = 0.1 * 0.25;
    CHECK(st.accumulator[0] == doctest::Approx(acc0).epsilon(1e-15));
    CHECK(p[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (std::sqrt(acc0) + 1e-8)).epsilon(1e-12));
    rmsprop_step(p, g, st);
    double acc0b = 0.9 * acc0 + 0.1 * 0.25;
    CHECK(st.accumulator[0] == doctest::Approx(acc0b).epsilon(1e-15));
}

TEST_CASE("gradient clipping is exact at the threshold") {
    std::vector<double> g1 = {3.0, 4.0};   // norm 5
    std::vector<double> g2 = {12.0};       // with g1: sqrt(9+16+144)=13
    std::vector<std::vector<double>*> gs = {&g1, &g2};
    CHECK(global_norm(gs) == doctest::Approx(13.0));
    double pre = clip_global_norm(gs, 5.0);
    CHECK(pre == doctest::Approx(13.0));
    CHECK(global_norm(gs) <= 5.0);
    CHECK(global_norm(gs) == doctest::Approx(5.0).epsilon(1e-9));
    // under the threshold: untouched
    std::vector<double> h = {1.0, 1.0};
    std::vector<std::vector<double>*> hs = {&h};
    double pre2 = clip_global_norm(hs, 40.0);
    CHECK(pre2 == doctest::Approx(std::sqrt(2.0)));
    CHECK(h[0] == 1.0);
}
