#pragma once

#include <optional>

#include <Eigen/Dense>

#include "bnptrack/conjugate.hpp"
#include "bnptrack/random.hpp"

namespace bnpt {

struct TargetState {
    double x = 0.0, y = 0.0;    // m
    double vx = 0.0, vy = 0.0;  // m/s
    std::optional<double> omega;  // rad/s, coordinated-turn only

    Eigen::Vector4d stacked() const { return {x, vx, y, vy}; }  // [x, vx, y, vy]
    static TargetState from_stacked(const Eigen::Vector4d& v, std::optional<double> omega = std::nullopt);
    friend bool operator==(const TargetState&, const TargetState&) = default;
};

enum class MotionModel { constant_velocity, coordinated_turn };

// How cluster parameters move between steps.
enum class ParamKernel {
    random_walk,  // mean += N(0, param_walk_cov)
    kinematic,    // mean follows a constant-velocity Kalman belief, plus N(0, param_walk_cov)
};

struct KernelConfig {
    double sigma_w = 15.0;                // m/s^2
    double sigma_u = M_PI / 180.0;        // rad/s
    double dt = 1.0;                      // s
    Matrix param_walk_cov = Matrix::Zero(2, 2);
    MotionModel motion = MotionModel::coordinated_turn;
    ParamKernel kernel = ParamKernel::random_walk;
    double birth_velocity_sd = 10.0;      // m/s, prior spread of a new cluster's velocity

    void validate() const;
    friend bool operator==(const KernelConfig& a, const KernelConfig& b) {
        return a.sigma_w == b.sigma_w && a.sigma_u == b.sigma_u && a.dt == b.dt &&
               a.param_walk_cov.rows() == b.param_walk_cov.rows() &&
               a.param_walk_cov.cols() == b.param_walk_cov.cols() && a.param_walk_cov == b.param_walk_cov &&
               a.motion == b.motion && a.kernel == b.kernel && a.birth_velocity_sd == b.birth_velocity_sd;
    }
};

Eigen::Matrix4d ct_matrix(double omega, double dt);
Eigen::Matrix4d cv_matrix(double dt);
Eigen::Matrix<double, 4, 2> noise_gain(double dt);
// sigma_w^2 B B^T
Eigen::Matrix4d process_noise_cov(double sigma_w, double dt);

TargetState ct_transition(const TargetState& s, const KernelConfig& cfg, Rng& rng);
TargetState cv_transition(const TargetState& s, const KernelConfig& cfg, Rng& rng);
// Dispatch on cfg.motion.
TargetState propagate_state(const TargetState& s, const KernelConfig& cfg, Rng& rng);

ClusterParams param_walk(const ClusterParams& theta, const KernelConfig& cfg, Rng& rng);

// Sensor at the origin. Bearing is measured from the +y axis toward +x.
struct Measurement {
    Eigen::Vector2d value = Eigen::Vector2d::Zero();  // (bearing, range) or (x, y)

    static Measurement range_bearing(double bearing, double range) { return {Eigen::Vector2d(bearing, range)}; }
    static Measurement position(double x, double y) { return {Eigen::Vector2d(x, y)}; }
    double bearing() const { return value[0]; }
    double range() const { return value[1]; }
};

enum class SensorKind { range_bearing, position };

struct RangeBearingNoise {
    double sigma_r2 = 25.0;
    double sigma_phi2 = (M_PI / 180.0) * (M_PI / 180.0);
};

// (bearing, range) of a position seen from the origin; throws NumericalError at the origin.
Eigen::Vector2d range_bearing_of(double x, double y);

double range_bearing_likelihood(const Measurement& z, const TargetState& s, const RangeBearingNoise& noise);

// Cartesian position implied by a measurement.
Eigen::Vector2d measurement_position(const Measurement& z, SensorKind kind);

// Linearized Cartesian covariance of a range-bearing measurement at (bearing, range).
Eigen::Matrix2d range_bearing_cartesian_cov(double bearing, double range, const RangeBearingNoise& noise);

// Constant-velocity Gaussian belief over [x, vx, y, vy].
struct KinematicBelief {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();
    friend bool operator==(const KinematicBelief&, const KinematicBelief&) = default;
};

KinematicBelief predict_belief(const KinematicBelief& b, const KernelConfig& cfg);
// Condition on the mean `ybar` of n position observations each with covariance r.
KinematicBelief update_belief(const KinematicBelief& b, const Eigen::Vector2d& ybar, const Eigen::Matrix2d& r, int n);
KinematicBelief initial_belief(const Eigen::Vector2d& position, const Eigen::Matrix2d& position_cov,
                               double velocity_sd);
Eigen::Vector2d belief_position(const KinematicBelief& b);
Eigen::Matrix2d belief_position_cov(const KinematicBelief& b);

}  // namespace bnpt
