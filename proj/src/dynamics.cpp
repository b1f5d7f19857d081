#include "ncbf/dynamics.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ncbf {

using std::numbers::pi;

ControlBox::ControlBox(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi))
{
    if (lo_.size() != hi_.size() || lo_.size() == 0)
        throw DynamicsError("ControlBox: bounds must be non-empty and of equal size");
    if ((lo_.array() > hi_.array()).any())
        throw DynamicsError("ControlBox: lo > hi");

    const Eigen::Index k = lo_.size();
    const std::size_t count = std::size_t{1} << k;
    vertices_.reserve(count);
    for (std::size_t idx = 0; idx < count; ++idx) {
        Vec v(k);
        for (Eigen::Index d = 0; d < k; ++d) {
            const bool high = (idx >> (k - 1 - d)) & 1u;
            v[d] = high ? hi_[d] : lo_[d];
        }
        vertices_.push_back(std::move(v));
    }
}

bool ControlBox::contains(const Vec &u, double slack) const
{
    return u.size() == dim() && (u.array() >= lo_.array() - slack).all() && (u.array() <= hi_.array() + slack).all();
}

SystemModel::SystemModel(std::string name, Box domain, ControlBox controls)
    : name_(std::move(name)), domain_(std::move(domain)), controls_(std::move(controls))
{
}

double maxAbsSin(const Interval &t)
{
    // peaks of |sin| at pi/2 + k pi
    const double k = std::ceil((t.lo() - pi / 2) / pi);
    if (pi / 2 + k * pi <= t.hi())
        return 1.0;
    return std::max(std::abs(std::sin(t.lo())), std::abs(std::sin(t.hi())));
}

double maxAbsCos(const Interval &t)
{
    const double k = std::ceil(t.lo() / pi);
    if (k * pi <= t.hi())
        return 1.0;
    return std::max(std::abs(std::cos(t.lo())), std::abs(std::cos(t.hi())));
}

// ---------------------------------------------------------------------------
// Pendulum: x = (theta, theta_dot), u = torque

Pendulum::Pendulum(PendulumParams p) : Pendulum(p, defaultDomain(), defaultControls()) {}

Pendulum::Pendulum(PendulumParams p, Box domain, ControlBox controls)
    : SystemModel("pendulum", std::move(domain), std::move(controls)), p_(p)
{
    if (stateDim() != 2 || controlDim() != 1)
        throw DynamicsError("pendulum needs a 2-D domain and a 1-D control box");
    if (p_.inertia <= 0.0)
        throw DynamicsError("pendulum inertia must be positive");
}

Box Pendulum::defaultDomain()
{
    return Box(Vec{{-pi, -4.0}}, Vec{{pi, 4.0}});
}

ControlBox Pendulum::defaultControls()
{
    return ControlBox(Vec{{-8.0}}, Vec{{8.0}});
}

Vec Pendulum::f(const Vec &x, const Vec &u) const
{
    const double mgl = p_.mass * p_.gravity * p_.length;
    return Vec{{x[1], (mgl * std::sin(x[0]) + u[0] - p_.friction * x[1]) / p_.inertia}};
}

Mat Pendulum::jacX(const Vec &x, const Vec &) const
{
    const double mgl = p_.mass * p_.gravity * p_.length;
    Mat j(2, 2);
    j << 0.0, 1.0, mgl * std::cos(x[0]) / p_.inertia, -p_.friction / p_.inertia;
    return j;
}

double Pendulum::hessNormBound(const Box &region, const Vec &, Eigen::Index i) const
{
    if (i == 0)
        return 0.0;
    // only d^2/dtheta^2 is nonzero: -mGL sin(theta) / J
    return p_.mass * p_.gravity * p_.length / p_.inertia * maxAbsSin(region[0]);
}

// ---------------------------------------------------------------------------
// Dubins car

Dubins::Dubins() : Dubins(defaultDomain(), defaultControls()) {}

Dubins::Dubins(Box domain, ControlBox controls) : SystemModel("dubins", std::move(domain), std::move(controls))
{
    if (stateDim() != 3 || controlDim() != 3)
        throw DynamicsError("dubins needs a 3-D domain and a 3-D control box (eps, eta, omega)");
}

Box Dubins::defaultDomain()
{
    return Box(Vec{{-2.0, -2.0, -pi}}, Vec{{2.0, 2.0, pi}});
}

ControlBox Dubins::defaultControls()
{
    return ControlBox(Vec{{-1.0, -1.0, -1.0}}, Vec{{1.0, 1.0, 1.0}});
}

Vec Dubins::f(const Vec &x, const Vec &u) const
{
    return Vec{{std::cos(x[2]) + u[0], std::sin(x[2]) + u[1], u[2]}};
}

Mat Dubins::jacX(const Vec &x, const Vec &) const
{
    Mat j = Mat::Zero(3, 3);
    j(0, 2) = -std::sin(x[2]);
    j(1, 2) = std::cos(x[2]);
    return j;
}

double Dubins::hessNormBound(const Box &, const Vec &, Eigen::Index i) const
{
    return i < 2 ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------
// Planar quadrotor

Quadrotor::Quadrotor(QuadrotorParams p) : Quadrotor(p, defaultDomain(), defaultControls(p)) {}

Quadrotor::Quadrotor(QuadrotorParams p, Box domain, ControlBox controls)
    : SystemModel("quadrotor", std::move(domain), std::move(controls)), p_(p)
{
    if (stateDim() != 6 || controlDim() != 2)
        throw DynamicsError("quadrotor needs a 6-D domain and a 2-D control box");
    if (p_.mass <= 0.0 || p_.inertia <= 0.0)
        throw DynamicsError("quadrotor mass and inertia must be positive");
}

Box Quadrotor::defaultDomain()
{
    return Box(Vec{{-1.0, -1.0, -pi / 4, -2.0, -2.0, -2.0}}, Vec{{1.0, 1.0, pi / 4, 2.0, 2.0, 2.0}});
}

ControlBox Quadrotor::defaultControls(const QuadrotorParams &p)
{
    const double fmax = 1.5 * p.mass * p.gravity;
    return ControlBox(Vec{{0.0, 0.0}}, Vec{{fmax, fmax}});
}

Vec Quadrotor::f(const Vec &x, const Vec &u) const
{
    const double thrust = u[0] + u[1];
    return Vec{{x[3], x[4], x[5], thrust * std::sin(x[2]) / p_.mass,
                thrust * std::cos(x[2]) / p_.mass - p_.gravity,
                p_.armLength * (u[1] - u[0]) / (2.0 * p_.inertia)}};
}

Mat Quadrotor::jacX(const Vec &x, const Vec &u) const
{
    const double thrust = u[0] + u[1];
    Mat j = Mat::Zero(6, 6);
    j(0, 3) = 1.0;
    j(1, 4) = 1.0;
    j(2, 5) = 1.0;
    j(3, 2) = thrust * std::cos(x[2]) / p_.mass;
    j(4, 2) = -thrust * std::sin(x[2]) / p_.mass;
    return j;
}

double Quadrotor::hessNormBound(const Box &region, const Vec &u, Eigen::Index i) const
{
    const double scale = std::abs(u[0] + u[1]) / p_.mass;
    if (i == 3)
        return scale * maxAbsSin(region[2]);
    if (i == 4)
        return scale * maxAbsCos(region[2]);
    return 0.0;
}

// ---------------------------------------------------------------------------

AffineSystem::AffineSystem(std::string name, Mat a, Mat b, Vec c, Box domain, ControlBox controls)
    : SystemModel(std::move(name), std::move(domain), std::move(controls)), a_(std::move(a)), b_(std::move(b)),
      c_(std::move(c))
{
    const Eigen::Index n = stateDim();
    if (a_.rows() != n || a_.cols() != n || b_.rows() != n || b_.cols() != controlDim() || c_.size() != n)
        throw DimensionError("AffineSystem: matrix shapes do not match the domain and control box");
}

// ---------------------------------------------------------------------------

std::unique_ptr<SystemModel> makePendulum()
{
    return std::make_unique<Pendulum>();
}

std::unique_ptr<SystemModel> makeDubins()
{
    return std::make_unique<Dubins>();
}

std::unique_ptr<SystemModel> makeQuadrotor()
{
    return std::make_unique<Quadrotor>();
}

namespace {

using nlohmann::json;

Vec readVec(const json &j, const char *key, Eigen::Index expected)
{
    const auto &a = j.at(key);
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expected)
        throw DynamicsError(std::string("config: '") + key + "' must be an array of length " +
                            std::to_string(expected));
    Vec v(expected);
    for (Eigen::Index i = 0; i < expected; ++i)
        v[i] = a[static_cast<std::size_t>(i)].get<double>();
    return v;
}

Box readBox(const json &doc, const char *key, const Box &fallback)
{
    if (!doc.contains(key))
        return fallback;
    const auto &b = doc.at(key);
    return Box(readVec(b, "lo", fallback.size()), readVec(b, "hi", fallback.size()));
}

ControlBox readControls(const json &doc, const ControlBox &fallback)
{
    if (!doc.contains("control"))
        return fallback;
    const auto &b = doc.at("control");
    return ControlBox(readVec(b, "lo", fallback.dim()), readVec(b, "hi", fallback.dim()));
}

double param(const json &params, const char *key, double fallback)
{
    return params.contains(key) ? params.at(key).get<double>() : fallback;
}

} // namespace

std::unique_ptr<SystemModel> makeSystemFromConfig(const std::string &name, const std::string &configJson)
{
    json doc = configJson.empty() ? json::object() : json::parse(configJson, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw DynamicsError("system config is not a JSON object");
    try {
        if (doc.contains("system") && doc.at("system").get<std::string>() != name)
            throw DynamicsError("system config is for '" + doc.at("system").get<std::string>() +
                                "', requested '" + name + "'");
        const json params = doc.value("params", json::object());

        if (name == "pendulum") {
            PendulumParams p;
            p.mass = param(params, "m", p.mass);
            p.gravity = param(params, "G", p.gravity);
            p.length = param(params, "L", p.length);
            p.inertia = param(params, "J", p.mass * p.length * p.length);
            p.friction = param(params, "b", p.friction);
            return std::make_unique<Pendulum>(p, readBox(doc, "domain", Pendulum::defaultDomain()),
                                              readControls(doc, Pendulum::defaultControls()));
        }
        if (name == "dubins")
            return std::make_unique<Dubins>(readBox(doc, "domain", Dubins::defaultDomain()),
                                            readControls(doc, Dubins::defaultControls()));
        if (name == "quadrotor") {
            QuadrotorParams p;
            p.mass = param(params, "m", p.mass);
            p.inertia = param(params, "J", p.inertia);
            p.gravity = param(params, "g", p.gravity);
            p.armLength = param(params, "l", p.armLength);
            return std::make_unique<Quadrotor>(p, readBox(doc, "domain", Quadrotor::defaultDomain()),
                                               readControls(doc, Quadrotor::defaultControls(p)));
        }
    } catch (const json::exception &e) {
        throw DynamicsError(std::string("system config schema violation: ") + e.what());
    }
    throw DynamicsError("unknown system '" + name + "' (expected pendulum|dubins|quadrotor)");
}

std::unique_ptr<SystemModel> makeSystem(const std::string &name, const std::filesystem::path &configPath)
{
    if (configPath.empty())
        return makeSystemFromConfig(name, "");
    std::ifstream in(configPath);
    if (!in)
        throw DynamicsError("cannot open system config " + configPath.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return makeSystemFromConfig(name, ss.str());
}

AffineDynBounds taylorAffineBounds(const SystemModel &sys, const Box &region, const Vec &u)
{
    if (region.size() != sys.stateDim())
        throw DimensionError("taylorAffineBounds: region dimension does not match system state");
    if (!sys.controls().contains(u))
        throw DynamicsError("taylorAffineBounds: control outside the admissible box");
    if (!sys.domain().contains(region, 1e-9))
        throw DynamicsError("taylorAffineBounds: region lies outside the state domain");

    const Vec x0 = region.mid();
    const Vec f0 = sys.f(x0, u);
    const Mat w = sys.jacX(x0, u);
    const double halfWidthSq = 0.5 * region.width().squaredNorm();

    const Vec center = f0 - w * x0;
    Vec remainder(sys.stateDim());
    for (Eigen::Index i = 0; i < sys.stateDim(); ++i)
        remainder[i] = halfWidthSq * sys.hessNormBound(region, u, i);

    return AffineDynBounds{w, center - remainder, center + remainder, region, u};
}

IntervalVector concretize(const AffineDynBounds &bounds)
{
    const IntervalVector lower = intervalAffineEval(bounds.w, bounds.bUnder, bounds.region);
    const IntervalVector upper = intervalAffineEval(bounds.w, bounds.bOver, bounds.region);
    return IntervalVector(lower.lo(), upper.hi());
}

} // namespace ncbf
