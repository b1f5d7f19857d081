#pragma once

#include "ncbf/interval.hpp"
#include "ncbf/network.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace ncbf {

/// Activation derivative together with the points where its own derivative
/// vanishes. Extrema of the derivative over any interval lie on the interval
/// endpoints or on these points.
struct ActivationSpec
{
    Activation kind;
    std::vector<double> criticalPoints; // sorted

    double derivative(double z) const { return activateDerivative(kind, z); }

    static ActivationSpec forKind(Activation kind);
};

// Roots of swish''(z) = sigmoid(z)(1 - sigmoid(z))(2 + z(1 - 2 sigmoid(z))), i.e. z tanh(z/2) = 2.
inline constexpr double kSwishDerivCritical = 2.3993572805154676678;

Interval tanhDerivBoundsExact(const Interval &z);
Interval genericDerivBounds(const ActivationSpec &spec, const Interval &z);

/// Looser comparator: evaluates 1 - tanh(z) * tanh(z) with the two factors
/// treated as independent intervals, clamped below at zero.
Interval baselineDerivBounds(const ActivationSpec &spec, const Interval &z);

enum class Bounder { LightCrown, Baseline };

std::string_view bounderName(Bounder b);
Bounder parseBounder(std::string_view name);

/// Per hidden layer, the diagonal of the activation-derivative interval matrix.
using DerivBoundsPerLayer = std::vector<IntervalVector>;

DerivBoundsPerLayer layerDerivBounds(const MlpNetwork &net, const PreactivationBounds &pre, Bounder bounder);

/// Backward propagation of Jacobian bounds through the network given
/// per-layer activation-derivative intervals. Returns [grad_lo, grad_hi] in input space.
IntervalVector jacobianBounds(const MlpNetwork &net, std::span<const IntervalVector> deriv);

} // namespace ncbf
