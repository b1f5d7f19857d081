#include "ncbf/network.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace ncbf {

namespace {

double sigmoid(double z)
{
    return 1.0 / (1.0 + std::exp(-z));
}

// Unique minimiser of swish(z) = z * sigmoid(z), root of 1 + z (1 - sigmoid(z)).
constexpr double kSwishArgMin = -1.2784645427610737951;

} // namespace

std::string_view activationName(Activation a)
{
    switch (a) {
    case Activation::Tanh:
        return "tanh";
    case Activation::Sigmoid:
        return "sigmoid";
    case Activation::Swish:
        return "swish";
    }
    return "unknown";
}

Activation parseActivation(std::string_view name)
{
    if (name == "tanh")
        return Activation::Tanh;
    if (name == "sigmoid")
        return Activation::Sigmoid;
    if (name == "swish")
        return Activation::Swish;
    throw NetworkError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double z)
{
    switch (a) {
    case Activation::Tanh:
        return std::tanh(z);
    case Activation::Sigmoid:
        return sigmoid(z);
    case Activation::Swish:
        return z * sigmoid(z);
    }
    return 0.0;
}

double activateDerivative(Activation a, double z)
{
    switch (a) {
    case Activation::Tanh: {
        const double t = std::tanh(z);
        return 1.0 - t * t;
    }
    case Activation::Sigmoid: {
        const double s = sigmoid(z);
        return s * (1.0 - s);
    }
    case Activation::Swish: {
        const double s = sigmoid(z);
        return s + z * s * (1.0 - s);
    }
    }
    return 0.0;
}

Interval activationImage(Activation a, const Interval &z)
{
    if (a == Activation::Swish) {
        const double flo = activate(a, z.lo());
        const double fhi = activate(a, z.hi());
        if (z.hi() <= kSwishArgMin)
            return Interval(fhi, flo);
        if (z.lo() >= kSwishArgMin)
            return Interval(flo, fhi);
        return Interval(activate(a, kSwishArgMin), std::max(flo, fhi));
    }
    return Interval(activate(a, z.lo()), activate(a, z.hi()));
}

MlpNetwork::MlpNetwork(std::vector<DenseLayer> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation)
{
    if (layers_.size() < 2)
        throw NetworkError("network needs at least one hidden layer and an output layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto &l = layers_[i];
        if (l.weight.rows() == 0 || l.weight.cols() == 0)
            throw NetworkError("layer " + std::to_string(i) + " has an empty weight matrix");
        if (l.bias.size() != l.weight.rows())
            throw NetworkError("layer " + std::to_string(i) + ": bias length " +
                               std::to_string(l.bias.size()) + " != weight rows " +
                               std::to_string(l.weight.rows()));
        if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows())
            throw NetworkError("shape chain broken at layer " + std::to_string(i) + ": weight has " +
                               std::to_string(l.weight.cols()) + " columns, previous layer has " +
                               std::to_string(layers_[i - 1].weight.rows()) + " outputs");
    }
    if (layers_.back().weight.rows() != 1)
        throw NetworkError("output layer must have exactly one unit");
}

void MlpNetwork::checkInput(Eigen::Index dim) const
{
    if (dim != inputDim())
        throw DimensionError("network expects input dimension " + std::to_string(inputDim()) +
                             ", got " + std::to_string(dim));
}

double MlpNetwork::forward(const Vec &x) const
{
    checkInput(x.size());
    Vec a = x;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        Vec z = layers_[i].weight * a + layers_[i].bias;
        a = z.unaryExpr([this](double v) { return activate(activation_, v); });
    }
    return (layers_.back().weight * a + layers_.back().bias)[0];
}

std::vector<Vec> MlpNetwork::preactivations(const Vec &x) const
{
    checkInput(x.size());
    std::vector<Vec> zs;
    zs.reserve(numHidden());
    Vec a = x;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
        zs.push_back(layers_[i].weight * a + layers_[i].bias);
        a = zs.back().unaryExpr([this](double v) { return activate(activation_, v); });
    }
    return zs;
}

Vec MlpNetwork::gradient(const Vec &x) const
{
    const auto zs = preactivations(x);
    Vec g = layers_.back().weight.row(0).transpose();
    for (std::size_t j = numHidden(); j-- > 0;) {
        const Vec d = zs[j].unaryExpr([this](double v) { return activateDerivative(activation_, v); });
        g = layers_[j].weight.transpose() * d.cwiseProduct(g);
    }
    return g;
}

PreactivationBounds preactivationIntervals(const MlpNetwork &net, const Box &region)
{
    if (region.size() != net.inputDim())
        throw DimensionError("preactivationIntervals: region dimension " + std::to_string(region.size()) +
                             " != network input " + std::to_string(net.inputDim()));
    PreactivationBounds out;
    out.hidden.reserve(net.numHidden());
    Box a = region;
    for (std::size_t i = 0; i < net.numHidden(); ++i) {
        const auto &l = net.layer(i);
        out.hidden.push_back(intervalAffineEval(l.weight, l.bias, a));
        const auto &z = out.hidden.back();
        Vec lo(z.size()), hi(z.size());
        for (Eigen::Index r = 0; r < z.size(); ++r) {
            const Interval img = activationImage(net.activation(), z[r]);
            lo[r] = img.lo();
            hi[r] = img.hi();
        }
        a = Box(std::move(lo), std::move(hi));
    }
    const auto &last = net.layers().back();
    const IntervalVector h = intervalAffineEval(last.weight, last.bias, a);
    out.output = h[0];
    return out;
}

namespace {

using nlohmann::json;

Mat matrixFromJson(const json &j, const std::string &what)
{
    if (!j.is_array() || j.empty())
        throw NetworkError(what + ": expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw NetworkError(what + ": ragged row " + std::to_string(r));
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Vec vectorFromJson(const json &j, const std::string &what)
{
    if (!j.is_array())
        throw NetworkError(what + ": expected an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

} // namespace

MlpNetwork networkFromJson(const std::string &text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw NetworkError(std::string("weight file is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.contains("activation") || !doc.contains("input_dim") || !doc.contains("layers"))
            throw NetworkError("weight file must contain 'activation', 'input_dim' and 'layers'");
        const Activation act = parseActivation(doc.at("activation").get<std::string>());
        const auto inputDim = doc.at("input_dim").get<long>();
        std::vector<DenseLayer> layers;
        const auto &jl = doc.at("layers");
        if (!jl.is_array())
            throw NetworkError("'layers' must be an array");
        for (std::size_t i = 0; i < jl.size(); ++i) {
            const std::string what = "layer " + std::to_string(i);
            layers.push_back({matrixFromJson(jl[i].at("weight"), what + " weight"),
                              vectorFromJson(jl[i].at("bias"), what + " bias")});
        }
        MlpNetwork net(std::move(layers), act);
        if (net.inputDim() != inputDim)
            throw NetworkError("input_dim " + std::to_string(inputDim) + " does not match first layer (" +
                               std::to_string(net.inputDim()) + " columns)");
        return net;
    } catch (const json::exception &e) {
        throw NetworkError(std::string("weight file schema violation: ") + e.what());
    }
}

std::string networkToJson(const MlpNetwork &net)
{
    json doc;
    doc["activation"] = std::string(activationName(net.activation()));
    doc["input_dim"] = net.inputDim();
    json layers = json::array();
    for (const auto &l : net.layers()) {
        json w = json::array();
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
                row.push_back(l.weight(r, c));
            w.push_back(std::move(row));
        }
        json b = json::array();
        for (Eigen::Index r = 0; r < l.bias.size(); ++r)
            b.push_back(l.bias[r]);
        layers.push_back({{"weight", std::move(w)}, {"bias", std::move(b)}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump(1);
}

MlpNetwork loadWeights(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw NetworkError("cannot open weight file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return networkFromJson(ss.str());
}

void saveWeights(const MlpNetwork &net, const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw NetworkError("cannot write weight file " + path.string());
    out << networkToJson(net) << '\n';
}

} // namespace ncbf
