#pragma once

#include "ncbf/interval.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace ncbf {

class DynamicsError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Axis-aligned control box; its corners are the vertices of the admissible control polytope.
class ControlBox
{
public:
    ControlBox(Vec lo, Vec hi);

    Eigen::Index dim() const { return lo_.size(); }
    const Vec &lo() const { return lo_; }
    const Vec &hi() const { return hi_; }
    bool contains(const Vec &u, double slack = 1e-9) const;

    /// Corners in lexicographic order (last control varies fastest, lo before hi).
    const std::vector<Vec> &vertices() const { return vertices_; }

private:
    Vec lo_;
    Vec hi_;
    std::vector<Vec> vertices_;
};

/// Control-affine or general smooth dynamics x' = f(x, u) with the analytic
/// state Jacobian and per-row Hessian spectral-norm bounds.
class SystemModel
{
public:
    SystemModel(std::string name, Box domain, ControlBox controls);
    virtual ~SystemModel() = default;

    const std::string &name() const { return name_; }
    Eigen::Index stateDim() const { return domain_.size(); }
    Eigen::Index controlDim() const { return controls_.dim(); }
    const Box &domain() const { return domain_; }
    const ControlBox &controls() const { return controls_; }

    virtual Vec f(const Vec &x, const Vec &u) const = 0;
    virtual Mat jacX(const Vec &x, const Vec &u) const = 0;

    /// Upper bound on the l2 operator norm of the Hessian of f_i (in x) over the region.
    virtual double hessNormBound(const Box &region, const Vec &u, Eigen::Index i) const = 0;

private:
    std::string name_;
    Box domain_;
    ControlBox controls_;
};

struct PendulumParams
{
    double mass = 1.0;
    double gravity = 9.81;
    double length = 0.5;
    double inertia = 0.25; // m L^2
    double friction = 0.1;
};

struct QuadrotorParams
{
    double mass = 0.5;
    double inertia = 0.01;
    double gravity = 9.81;
    double armLength = 0.3;
};

class Pendulum : public SystemModel
{
public:
    explicit Pendulum(PendulumParams p = {});
    Pendulum(PendulumParams p, Box domain, ControlBox controls);

    const PendulumParams &params() const { return p_; }
    Vec f(const Vec &x, const Vec &u) const override;
    Mat jacX(const Vec &x, const Vec &u) const override;
    double hessNormBound(const Box &region, const Vec &u, Eigen::Index i) const override;

    static Box defaultDomain();
    static ControlBox defaultControls();

private:
    PendulumParams p_;
};

/// Dubins car with state (px, py, phi) and control (eps, eta, omega).
class Dubins : public SystemModel
{
public:
    Dubins();
    Dubins(Box domain, ControlBox controls);

    Vec f(const Vec &x, const Vec &u) const override;
    Mat jacX(const Vec &x, const Vec &u) const override;
    double hessNormBound(const Box &region, const Vec &u, Eigen::Index i) const override;

    static Box defaultDomain();
    static ControlBox defaultControls();
};

/// Planar quadrotor with state (px, py, theta, vx, vy, omega) and thrusts (F1, F2).
class Quadrotor : public SystemModel
{
public:
    explicit Quadrotor(QuadrotorParams p = {});
    Quadrotor(QuadrotorParams p, Box domain, ControlBox controls);

    const QuadrotorParams &params() const { return p_; }
    Vec f(const Vec &x, const Vec &u) const override;
    Mat jacX(const Vec &x, const Vec &u) const override;
    double hessNormBound(const Box &region, const Vec &u, Eigen::Index i) const override;

    static Box defaultDomain();
    static ControlBox defaultControls(const QuadrotorParams &p);

private:
    QuadrotorParams p_;
};

/// x' = A x + B u + c. Zero Hessian, so Taylor envelopes are exact.
class AffineSystem : public SystemModel
{
public:
    AffineSystem(std::string name, Mat a, Mat b, Vec c, Box domain, ControlBox controls);

    Vec f(const Vec &x, const Vec &u) const override { return a_ * x + b_ * u + c_; }
    Mat jacX(const Vec &, const Vec &) const override { return a_; }
    double hessNormBound(const Box &, const Vec &, Eigen::Index) const override { return 0.0; }

private:
    Mat a_;
    Mat b_;
    Vec c_;
};

std::unique_ptr<SystemModel> makePendulum();
std::unique_ptr<SystemModel> makeDubins();
std::unique_ptr<SystemModel> makeQuadrotor();

/// Builds a benchmark system by name, optionally overriding parameters,
/// domain and control box from a JSON config file.
std::unique_ptr<SystemModel> makeSystem(const std::string &name, const std::filesystem::path &configPath = {});
std::unique_ptr<SystemModel> makeSystemFromConfig(const std::string &name, const std::string &configJson);

/// Sup of |sin| and |cos| over an interval.
double maxAbsSin(const Interval &t);
double maxAbsCos(const Interval &t);

/// Affine envelopes W x + bUnder <= f(x, u) <= W x + bOver on a region.
struct AffineDynBounds
{
    Mat w;
    Vec bUnder;
    Vec bOver;
    Box region;
    Vec control;

    Vec lower(const Vec &x) const { return w * x + bUnder; }
    Vec upper(const Vec &x) const { return w * x + bOver; }
};

AffineDynBounds taylorAffineBounds(const SystemModel &sys, const Box &region, const Vec &u);

/// Constant enclosure of f over the bounds' region.
IntervalVector concretize(const AffineDynBounds &bounds);

} // namespace ncbf
