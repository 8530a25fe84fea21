#include "bnptrack/kinematics.hpp"

#include <cmath>

#include "bnptrack/errors.hpp"

namespace bnpt {

namespace {

constexpr double kSmallOmega = 1e-8;

}  // namespace

TargetState TargetState::from_stacked(const Eigen::Vector4d& v, std::optional<double> omega) {
    return TargetState{v[0], v[2], v[1], v[3], omega};
}

void KernelConfig::validate() const {
    if (!(sigma_w >= 0.0)) throw ParameterError("sigma_w must be non-negative");
    if (!(sigma_u >= 0.0)) throw ParameterError("sigma_u must be non-negative");
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (!(birth_velocity_sd >= 0.0)) throw ParameterError("birth_velocity_sd must be non-negative");
    if (param_walk_cov.rows() != param_walk_cov.cols()) throw DimensionError("param_walk_cov must be square");
}

Eigen::Matrix4d ct_matrix(double omega, double dt) {
    double s_over_w, c_over_w;
    const double c = std::cos(omega * dt), s = std::sin(omega * dt);
    if (std::abs(omega) < kSmallOmega) {
        s_over_w = dt;
        c_over_w = 0.0;
    } else {
        s_over_w = s / omega;
        const double h = std::sin(0.5 * omega * dt);
        c_over_w = 2.0 * h * h / omega;  // (1 - cos) / omega without cancellation
    }
    Eigen::Matrix4d a;
    a << 1, s_over_w, 0, -c_over_w,
         0, c, 0, -s,
         0, c_over_w, 1, s_over_w,
         0, s, 0, c;
    return a;
}

Eigen::Matrix4d cv_matrix(double dt) {
    Eigen::Matrix4d a;
    a << 1, dt, 0, 0,
         0, 1, 0, 0,
         0, 0, 1, dt,
         0, 0, 0, 1;
    return a;
}

Eigen::Matrix<double, 4, 2> noise_gain(double dt) {
    Eigen::Matrix<double, 4, 2> b;
    b << 0.5 * dt * dt, 0,
         dt, 0,
         0, 0.5 * dt * dt,
         0, dt;
    return b;
}

Eigen::Matrix4d process_noise_cov(double sigma_w, double dt) {
    auto b = noise_gain(dt);
    return sigma_w * sigma_w * (b * b.transpose());
}

namespace {

Eigen::Vector4d accel_noise(const KernelConfig& cfg, Rng& rng) {
    if (cfg.sigma_w == 0.0) return Eigen::Vector4d::Zero();
    Eigen::Vector2d w(sample_normal(rng), sample_normal(rng));
    return cfg.sigma_w * (noise_gain(cfg.dt) * w);
}

}  // namespace

TargetState ct_transition(const TargetState& s, const KernelConfig& cfg, Rng& rng) {
    if (!s.omega) throw PreconditionError("ct_transition: state has no turn rate");
    const double omega = *s.omega;
    Eigen::Vector4d next = ct_matrix(omega, cfg.dt) * s.stacked() + accel_noise(cfg, rng);
    double next_omega = omega;
    if (cfg.sigma_u != 0.0) next_omega += cfg.sigma_u * sample_normal(rng);
    return TargetState::from_stacked(next, next_omega);
}

TargetState cv_transition(const TargetState& s, const KernelConfig& cfg, Rng& rng) {
    Eigen::Vector4d next = cv_matrix(cfg.dt) * s.stacked() + accel_noise(cfg, rng);
    return TargetState::from_stacked(next);
}

TargetState propagate_state(const TargetState& s, const KernelConfig& cfg, Rng& rng) {
    if (cfg.motion == MotionModel::coordinated_turn) {
        TargetState t = s;
        if (!t.omega) t.omega = 0.0;
        return ct_transition(t, cfg, rng);
    }
    return cv_transition(s, cfg, rng);
}

ClusterParams param_walk(const ClusterParams& theta, const KernelConfig& cfg, Rng& rng) {
    if (cfg.param_walk_cov.rows() != theta.mean.size())
        throw DimensionError("param_walk: walk covariance does not match parameter dimension");
    ClusterParams out = theta;
    if (cfg.param_walk_cov.isZero(0.0)) return out;
    out.mean = sample_mvn(theta.mean, cfg.param_walk_cov, rng);
    return out;
}

Eigen::Vector2d range_bearing_of(double x, double y) {
    if (x == 0.0 && y == 0.0) throw NumericalError("bearing is undefined at the sensor origin");
    return {std::atan2(x, y), std::hypot(x, y)};
}

double range_bearing_likelihood(const Measurement& z, const TargetState& s, const RangeBearingNoise& noise) {
    if (!(noise.sigma_r2 > 0.0) || !(noise.sigma_phi2 > 0.0))
        throw ParameterError("range-bearing noise variances must be positive");
    Eigen::Vector2d pred = range_bearing_of(s.x, s.y);
    double db = std::remainder(z.bearing() - pred[0], 2.0 * M_PI);
    double dr = z.range() - pred[1];
    return -0.5 * std::log(4.0 * M_PI * M_PI * noise.sigma_r2 * noise.sigma_phi2) -
           0.5 * (db * db / noise.sigma_phi2 + dr * dr / noise.sigma_r2);
}

Eigen::Vector2d measurement_position(const Measurement& z, SensorKind kind) {
    if (kind == SensorKind::position) return z.value;
    return {z.range() * std::sin(z.bearing()), z.range() * std::cos(z.bearing())};
}

Eigen::Matrix2d range_bearing_cartesian_cov(double bearing, double range, const RangeBearingNoise& noise) {
    // Jacobian of (r sin phi, r cos phi) w.r.t. (phi, r).
    Eigen::Matrix2d j;
    j << range * std::cos(bearing), std::sin(bearing),
        -range * std::sin(bearing), std::cos(bearing);
    Eigen::Matrix2d r = Eigen::Vector2d(noise.sigma_phi2, noise.sigma_r2).asDiagonal();
    return j * r * j.transpose();
}

KinematicBelief predict_belief(const KinematicBelief& b, const KernelConfig& cfg) {
    const Eigen::Matrix4d a = cv_matrix(cfg.dt);
    KinematicBelief out;
    out.mean = a * b.mean;
    out.cov = a * b.cov * a.transpose() + process_noise_cov(cfg.sigma_w, cfg.dt);
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

KinematicBelief update_belief(const KinematicBelief& b, const Eigen::Vector2d& ybar, const Eigen::Matrix2d& r, int n) {
    if (n <= 0) return b;
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = 1.0;
    h(1, 2) = 1.0;
    const Eigen::Matrix2d s = h * b.cov * h.transpose() + r / static_cast<double>(n);
    const Eigen::Matrix<double, 4, 2> k = b.cov * h.transpose() * s.inverse();
    KinematicBelief out;
    out.mean = b.mean + k * (ybar - h * b.mean);
    // Joseph form keeps the covariance symmetric positive definite.
    const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * h;
    out.cov = ikh * b.cov * ikh.transpose() + k * (r / static_cast<double>(n)) * k.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

KinematicBelief initial_belief(const Eigen::Vector2d& position, const Eigen::Matrix2d& position_cov,
                               double velocity_sd) {
    KinematicBelief b;
    b.mean << position[0], 0.0, position[1], 0.0;
    b.cov.setZero();
    b.cov(0, 0) = position_cov(0, 0);
    b.cov(0, 2) = position_cov(0, 1);
    b.cov(2, 0) = position_cov(1, 0);
    b.cov(2, 2) = position_cov(1, 1);
    b.cov(1, 1) = velocity_sd * velocity_sd;
    b.cov(3, 3) = velocity_sd * velocity_sd;
    return b;
}

Eigen::Vector2d belief_position(const KinematicBelief& b) { return {b.mean[0], b.mean[2]}; }

Eigen::Matrix2d belief_position_cov(const KinematicBelief& b) {
    Eigen::Matrix2d p;
    p << b.cov(0, 0), b.cov(0, 2), b.cov(2, 0), b.cov(2, 2);
    return p;
}

}  // namespace bnpt
