#include "ncbf/bounders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ncbf {

ActivationSpec ActivationSpec::forKind(Activation kind)
{
    switch (kind) {
    case Activation::Tanh:
    case Activation::Sigmoid:
        return {kind, {0.0}};
    case Activation::Swish:
        return {kind, {-kSwishDerivCritical, kSwishDerivCritical}};
    }
    throw std::invalid_argument("ActivationSpec: unknown activation");
}

Interval tanhDerivBoundsExact(const Interval &z)
{
    auto d = [](double v) {
        const double t = std::tanh(v);
        return 1.0 - t * t;
    };
    const double dl = d(z.lo());
    const double du = d(z.hi());
    if (z.lo() <= 0.0 && 0.0 <= z.hi())
        return Interval(std::min(dl, du), 1.0);
    if (z.hi() <= 0.0)
        return Interval(dl, du);
    return Interval(du, dl);
}

Interval genericDerivBounds(const ActivationSpec &spec, const Interval &z)
{
    double lo = spec.derivative(z.lo());
    double hi = lo;
    auto visit = [&](double v) {
        const double d = spec.derivative(v);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    };
    visit(z.hi());
    for (double c : spec.criticalPoints)
        if (z.lo() <= c && c <= z.hi())
            visit(c);
    return Interval(lo, hi);
}

Interval baselineDerivBounds(const ActivationSpec &spec, const Interval &z)
{
    if (spec.kind != Activation::Tanh)
        throw std::invalid_argument("baseline derivative bounds are only defined for tanh, got " +
                                    std::string(activationName(spec.kind)));
    const Interval s(std::tanh(z.lo()), std::tanh(z.hi()));
    const Interval sq = s * s;
    return Interval(std::max(0.0, 1.0 - sq.hi()), 1.0 - sq.lo());
}

std::string_view bounderName(Bounder b)
{
    return b == Bounder::LightCrown ? "lightcrown" : "baseline";
}

Bounder parseBounder(std::string_view name)
{
    if (name == "lightcrown")
        return Bounder::LightCrown;
    if (name == "baseline")
        return Bounder::Baseline;
    throw std::invalid_argument("unknown bounder '" + std::string(name) + "' (expected lightcrown|baseline)");
}

DerivBoundsPerLayer layerDerivBounds(const MlpNetwork &net, const PreactivationBounds &pre, Bounder bounder)
{
    const ActivationSpec spec = ActivationSpec::forKind(net.activation());
    DerivBoundsPerLayer out;
    out.reserve(pre.hidden.size());
    for (const auto &z : pre.hidden) {
        Vec lo(z.size()), hi(z.size());
        for (Eigen::Index r = 0; r < z.size(); ++r) {
            Interval d;
            if (bounder == Bounder::Baseline)
                d = baselineDerivBounds(spec, z[r]);
            else if (spec.kind == Activation::Tanh)
                d = tanhDerivBoundsExact(z[r]);
            else
                d = genericDerivBounds(spec, z[r]);
            lo[r] = d.lo();
            hi[r] = d.hi();
        }
        out.emplace_back(std::move(lo), std::move(hi));
    }
    return out;
}

IntervalVector jacobianBounds(const MlpNetwork &net, std::span<const IntervalVector> deriv)
{
    if (deriv.size() != net.numHidden())
        throw DimensionError("jacobianBounds: got " + std::to_string(deriv.size()) +
                             " derivative layers for a network with " + std::to_string(net.numHidden()) +
                             " hidden layers");

    Vec qLo = net.layers().back().weight.row(0).transpose();
    Vec qHi = qLo;

    for (std::size_t j = net.numHidden(); j-- > 0;) {
        const Vec &jLo = deriv[j].lo();
        const Vec &jHi = deriv[j].hi();
        if (jLo.size() != qLo.size())
            throw DimensionError("jacobianBounds: derivative layer " + std::to_string(j) + " has width " +
                                 std::to_string(jLo.size()) + ", expected " + std::to_string(qLo.size()));

        // Multiply by the diagonal derivative interval.
        Vec tLo(qLo.size()), tHi(qLo.size());
        if ((jLo.array() >= 0.0).all()) {
            tLo = jLo.cwiseProduct(qLo.cwiseMax(0.0)) + jHi.cwiseProduct(qLo.cwiseMin(0.0));
            tHi = jHi.cwiseProduct(qHi.cwiseMax(0.0)) + jLo.cwiseProduct(qHi.cwiseMin(0.0));
        } else {
            // Derivatives that change sign (swish) need the full interval product.
            for (Eigen::Index r = 0; r < qLo.size(); ++r) {
                const Interval p = Interval(jLo[r], jHi[r]) * Interval(qLo[r], qHi[r]);
                tLo[r] = p.lo();
                tHi[r] = p.hi();
            }
        }

        // Multiply by W_j^T.
        const Mat wt = net.layer(j).weight.transpose();
        const Mat wtPos = posPart(wt);
        const Mat wtNeg = negPart(wt);
        qLo = wtPos * tLo + wtNeg * tHi;
        qHi = wtPos * tHi + wtNeg * tLo;
    }
    return IntervalVector(std::move(qLo), std::move(qHi));
}

} // namespace ncbf
