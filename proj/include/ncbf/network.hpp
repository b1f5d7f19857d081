#pragma once

#include "ncbf/interval.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ncbf {

enum class Activation { Tanh, Sigmoid, Swish };

std::string_view activationName(Activation a);
Activation parseActivation(std::string_view name);

double activate(Activation a, double z);
double activateDerivative(Activation a, double z);

/// Exact image of the activation over an interval. Tanh and sigmoid are
/// monotone; swish has one interior minimum.
Interval activationImage(Activation a, const Interval &z);

struct DenseLayer
{
    Mat weight; // rows = outputs, cols = inputs
    Vec bias;
};

class NetworkError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Scalar-output MLP h(x) = W_L s(... s(W_1 x + b_1) ...) + b_L with the
/// same activation on every hidden layer.
class MlpNetwork
{
public:
    MlpNetwork(std::vector<DenseLayer> layers, Activation activation);

    Eigen::Index inputDim() const { return layers_.front().weight.cols(); }
    std::size_t numLayers() const { return layers_.size(); }
    std::size_t numHidden() const { return layers_.size() - 1; }
    Eigen::Index hiddenWidth(std::size_t i) const { return layers_[i].weight.rows(); }
    const std::vector<DenseLayer> &layers() const { return layers_; }
    const DenseLayer &layer(std::size_t i) const { return layers_[i]; }
    Activation activation() const { return activation_; }

    double forward(const Vec &x) const;

    /// Pre-activations z_1 .. z_{L-1} at a point (hidden layers only).
    std::vector<Vec> preactivations(const Vec &x) const;

    /// Analytic input gradient by the chain rule.
    Vec gradient(const Vec &x) const;

private:
    void checkInput(Eigen::Index dim) const;

    std::vector<DenseLayer> layers_;
    Activation activation_;
};

struct PreactivationBounds
{
    std::vector<IntervalVector> hidden; // z_1 .. z_{L-1}
    Interval output;                    // [h_L, h_U]
};

/// Interval bound propagation of every hidden pre-activation and of the output over a region.
PreactivationBounds preactivationIntervals(const MlpNetwork &net, const Box &region);

MlpNetwork loadWeights(const std::filesystem::path &path);
void saveWeights(const MlpNetwork &net, const std::filesystem::path &path);

MlpNetwork networkFromJson(const std::string &text);
std::string networkToJson(const MlpNetwork &net);

} // namespace ncbf
