#include <doctest.h>

#include <cmath>

#include "bnptrack/errors.hpp"
#include "bnptrack/kinematics.hpp"
#include "oracles.hpp"

using namespace bnpt;

namespace {

KernelConfig quiet(MotionModel m) {
    KernelConfig c;
    c.sigma_w = 0.0;
    c.sigma_u = 0.0;
    c.motion = m;
    return c;
}

}  // namespace

TEST_CASE("radar defaults") {
    KernelConfig c;
    CHECK(c.sigma_w == 15.0);
    CHECK(c.sigma_u == doctest::Approx(M_PI / 180.0));
    CHECK(c.dt == 1.0);
    RangeBearingNoise n;
    CHECK(n.sigma_r2 == 25.0);
    CHECK(n.sigma_phi2 == doctest::Approx(std::pow(M_PI / 180.0, 2)));
}

TEST_CASE("coordinated-turn matrix reduces to constant velocity at zero turn rate") {
    for (double dt : {0.5, 1.0, 2.0}) {
        const Eigen::Matrix4d a = ct_matrix(0.0, dt);
        CHECK((a - cv_matrix(dt)).cwiseAbs().maxCoeff() == 0.0);
        Eigen::Matrix4d expect;
        expect << 1, dt, 0, 0, 0, 1, 0, 0, 0, 0, 1, dt, 0, 0, 0, 1;
        CHECK((cv_matrix(dt) - expect).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("coordinated-turn matrix is continuous across the small-rate switch") {
    for (double dt : {1.0, 3.0}) {
        const Eigen::Matrix4d lo = ct_matrix(1e-8 * (1 - 1e-6), dt), hi = ct_matrix(1e-8 * (1 + 1e-6), dt);
        CHECK((lo - hi).cwiseAbs().maxCoeff() < 1e-6);
        const Eigen::Matrix4d nlo = ct_matrix(-1e-8 * (1 - 1e-6), dt), nhi = ct_matrix(-1e-8 * (1 + 1e-6), dt);
        CHECK((nlo - nhi).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("coordinated-turn matrix rotates velocity") {
    const double w = 0.1;
    const Eigen::Matrix4d a = ct_matrix(w, 1.0);
    const Eigen::Vector4d x(0, 10, 0, 0);
    const Eigen::Vector4d y = a * x;
    CHECK(std::hypot(y[1], y[3]) == doctest::Approx(10.0));
    CHECK(std::atan2(y[3], y[1]) == doctest::Approx(w));
    CHECK(y[0] == doctest::Approx(10 * std::sin(w) / w));
    CHECK(y[2] == doctest::Approx(10 * (1 - std::cos(w)) / w));
}

TEST_CASE("constant-velocity step without noise") {
    Rng rng = make_rng(31);
    const TargetState s{5.0, 2.0, 1.0, 0.0, std::nullopt};
    const TargetState n = cv_transition(s, quiet(MotionModel::constant_velocity), rng);
    CHECK(n.x == 6.0);
    CHECK(n.y == 2.0);
    CHECK(n.vx == 1.0);
    CHECK(!n.omega);
}

TEST_CASE("turn step at zero rate equals constant-velocity step under a shared generator") {
    Rng seeds = make_rng(32);
    for (int t = 0; t < 1000; ++t) {
        KernelConfig c;
        c.sigma_w = 20.0 * uniform01(seeds);
        c.sigma_u = 0.0;
        const std::uint64_t seed = seeds();
        Rng a = make_rng(seed), b = make_rng(seed);
        const TargetState s{100 * sample_normal(seeds), 100 * sample_normal(seeds), 10 * sample_normal(seeds),
                            10 * sample_normal(seeds), 0.0};
        const TargetState ct = ct_transition(s, c, a);
        const TargetState cv = cv_transition(s, c, b);
        CHECK(std::abs(ct.x - cv.x) <= 1e-9);
        CHECK(std::abs(ct.y - cv.y) <= 1e-9);
        CHECK(std::abs(ct.vx - cv.vx) <= 1e-9);
        CHECK(std::abs(ct.vy - cv.vy) <= 1e-9);
        CHECK(*ct.omega == 0.0);
    }
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(ct_transition(TargetState{}, KernelConfig{}, rng), PreconditionError);
}

TEST_CASE("transition noise covariance") {
    Rng rng = make_rng(33);
    KernelConfig c;  // sigma_w = 15, sigma_u = 1 degree
    const TargetState s{100.0, 200.0, 5.0, -3.0, 0.02};
    const Eigen::Vector4d mean = ct_matrix(0.02, 1.0) * s.stacked();
    Eigen::Matrix<double, 5, 5> acc = Eigen::Matrix<double, 5, 5>::Zero();
    const int R = 100000;
    for (int r = 0; r < R; ++r) {
        const TargetState n = ct_transition(s, c, rng);
        Eigen::Matrix<double, 5, 1> e;
        e << n.stacked() - mean, *n.omega - 0.02;
        acc += e * e.transpose();
    }
    acc /= R;
    Eigen::Matrix<double, 5, 5> expect = Eigen::Matrix<double, 5, 5>::Zero();
    expect.topLeftCorner<4, 4>() = process_noise_cov(15.0, 1.0);
    expect(4, 4) = c.sigma_u * c.sigma_u;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const double scale = std::sqrt(expect(i, i) * expect(j, j));
            if (expect(i, j) != 0.0)
                CHECK(std::abs(acc(i, j) - expect(i, j)) <= 0.03 * std::abs(expect(i, j)));
            else
                CHECK(std::abs(acc(i, j)) <= 0.03 * scale);
        }
    // process noise is sigma_w^2 B B^T
    const auto b = noise_gain(1.0);
    CHECK((process_noise_cov(15.0, 1.0) - 225.0 * b * b.transpose()).norm() < 1e-12);
}

TEST_CASE("constant-velocity noise covariance") {
    Rng rng = make_rng(34);
    KernelConfig c;
    c.sigma_w = 3.0;
    c.motion = MotionModel::constant_velocity;
    const TargetState s{0, 0, 1, 1, std::nullopt};
    const Eigen::Vector4d mean = cv_matrix(1.0) * s.stacked();
    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    const int R = 100000;
    for (int r = 0; r < R; ++r) {
        const Eigen::Vector4d e = propagate_state(s, c, rng).stacked() - mean;
        acc += e * e.transpose();
    }
    acc /= R;
    const Eigen::Matrix4d q = process_noise_cov(3.0, 1.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (q(i, j) != 0.0) CHECK(std::abs(acc(i, j) - q(i, j)) <= 0.03 * std::abs(q(i, j)));
        }
}

TEST_CASE("range-bearing geometry") {
    const Eigen::Vector2d rb = range_bearing_of(3.0, 4.0);
    CHECK(rb[0] == doctest::Approx(std::atan2(3.0, 4.0)));
    CHECK(rb[1] == doctest::Approx(5.0));
    CHECK_THROWS_AS(range_bearing_of(0.0, 0.0), NumericalError);
    const Eigen::Vector2d p = measurement_position(Measurement::range_bearing(rb[0], rb[1]), SensorKind::range_bearing);
    CHECK(p[0] == doctest::Approx(3.0));
    CHECK(p[1] == doctest::Approx(4.0));
    const Eigen::Vector2d q = measurement_position(Measurement::position(-2.0, 7.0), SensorKind::position);
    CHECK(q == Eigen::Vector2d(-2.0, 7.0));
}

TEST_CASE("range-bearing likelihood") {
    const RangeBearingNoise n;
    const TargetState s{400.0, 900.0, 0, 0, std::nullopt};
    const Eigen::Vector2d rb = range_bearing_of(s.x, s.y);
    const double peak = range_bearing_likelihood(Measurement::range_bearing(rb[0], rb[1]), s, n);
    CHECK(peak == doctest::Approx(-0.5 * std::log(std::pow(2 * M_PI, 2) * n.sigma_r2 * n.sigma_phi2)).epsilon(1e-13));
    CHECK_THROWS_AS(range_bearing_likelihood(Measurement::range_bearing(0, 1), TargetState{}, n), NumericalError);

    // integrates to one over a +-5 sigma box in measurement space
    const double sr = std::sqrt(n.sigma_r2), sp = std::sqrt(n.sigma_phi2);
    const int G = 600;
    const double hb = 10 * sp / G, hr = 10 * sr / G;
    double total = 0.0;
    for (int i = 0; i <= G; ++i)
        for (int j = 0; j <= G; ++j) {
            const double w = (i == 0 || i == G ? 0.5 : 1.0) * (j == 0 || j == G ? 0.5 : 1.0);
            const Measurement z = Measurement::range_bearing(rb[0] - 5 * sp + i * hb, rb[1] - 5 * sr + j * hr);
            total += w * std::exp(range_bearing_likelihood(z, s, n));
        }
    total *= hb * hr;
    CHECK(std::abs(total - 1.0) <= 1e-3);

    // bearing residual wraps
    const TargetState back{-1e-9, -500.0, 0, 0, std::nullopt};
    const Eigen::Vector2d brb = range_bearing_of(back.x, back.y);
    const double a = range_bearing_likelihood(Measurement::range_bearing(brb[0], 500.0), back, n);
    const double b = range_bearing_likelihood(Measurement::range_bearing(brb[0] - 2 * M_PI, 500.0), back, n);
    CHECK(a == doctest::Approx(b));
}

TEST_CASE("Cartesian covariance of a range-bearing measurement") {
    Rng rng = make_rng(35);
    const RangeBearingNoise n;
    const double b0 = 0.4, r0 = 1200.0;
    const Eigen::Matrix2d cov = range_bearing_cartesian_cov(b0, r0, n);
    Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
    const Eigen::Vector2d c(r0 * std::sin(b0), r0 * std::cos(b0));
    const int R = 100000;
    for (int r = 0; r < R; ++r) {
        const Measurement z = Measurement::range_bearing(b0 + std::sqrt(n.sigma_phi2) * sample_normal(rng),
                                                         r0 + std::sqrt(n.sigma_r2) * sample_normal(rng));
        const Eigen::Vector2d e = measurement_position(z, SensorKind::range_bearing) - c;
        acc += e * e.transpose();
    }
    acc /= R;
    CHECK((acc - cov).norm() < 0.03 * cov.norm());
}

TEST_CASE("Kalman belief predict and update") {
    KinematicBelief b = initial_belief(Eigen::Vector2d(10, 20), Eigen::Matrix2d::Identity() * 4.0, 5.0);
    CHECK(b.mean == Eigen::Vector4d(10, 0, 20, 0));
    CHECK(b.cov(1, 1) == 25.0);
    CHECK(belief_position(b) == Eigen::Vector2d(10, 20));
    CHECK(belief_position_cov(b) == Eigen::Matrix2d::Identity() * 4.0);

    KernelConfig c;
    c.sigma_w = 2.0;
    const KinematicBelief p = predict_belief(b, c);
    const Eigen::Matrix4d a = cv_matrix(1.0);
    CHECK((p.mean - a * b.mean).norm() < 1e-12);
    CHECK((p.cov - (a * b.cov * a.transpose() + process_noise_cov(2.0, 1.0))).norm() < 1e-12);

    // n identical measurements with noise R equal one measurement with noise R/n
    const Eigen::Vector2d y(13, 18);
    const Eigen::Matrix2d r = Eigen::Matrix2d::Identity() * 9.0;
    KinematicBelief seq = p;
    for (int i = 0; i < 4; ++i) seq = update_belief(seq, y, r, 1);
    const KinematicBelief once = update_belief(p, y, r, 4);
    CHECK((seq.mean - once.mean).norm() < 1e-9);
    CHECK((seq.cov - once.cov).norm() < 1e-9);
    CHECK(update_belief(p, y, r, 0) == p);
    const Eigen::LLT<Eigen::Matrix4d> llt(once.cov);
    CHECK(llt.info() == Eigen::Success);
}
