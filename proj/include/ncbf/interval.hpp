#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ncbf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed real interval [lo, hi]. Degenerate intervals are allowed, empty ones are not.
class Interval
{
public:
    Interval() = default;
    explicit Interval(double point) : lo_(point), hi_(point) {}
    Interval(double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    double mid() const { return 0.5 * (lo_ + hi_); }

    bool contains(double x, double slack = 0.0) const { return x >= lo_ - slack && x <= hi_ + slack; }
    bool contains(const Interval &other, double slack = 0.0) const
    {
        return other.lo_ >= lo_ - slack && other.hi_ <= hi_ + slack;
    }
    bool straddlesZero() const { return lo_ <= 0.0 && 0.0 <= hi_; }

    friend bool operator==(const Interval &, const Interval &) = default;

private:
    double lo_ = 0.0;
    double hi_ = 0.0;
};

Interval operator+(const Interval &a, const Interval &b);
Interval operator-(const Interval &a, const Interval &b);
Interval operator*(const Interval &a, const Interval &b);
Interval operator*(double s, const Interval &a);

/// Componentwise interval vector, stored as a pair of endpoint vectors.
class IntervalVector
{
public:
    IntervalVector() = default;
    IntervalVector(Vec lo, Vec hi);
    explicit IntervalVector(const std::vector<Interval> &components);
    static IntervalVector point(const Vec &x) { return IntervalVector(x, x); }

    Eigen::Index size() const { return lo_.size(); }
    const Vec &lo() const { return lo_; }
    const Vec &hi() const { return hi_; }
    Interval operator[](Eigen::Index i) const { return Interval(lo_[i], hi_[i]); }

    Vec mid() const { return 0.5 * (lo_ + hi_); }
    Vec width() const { return hi_ - lo_; }
    double volume() const;

    bool contains(const Vec &x, double slack = 0.0) const;
    bool contains(const IntervalVector &other, double slack = 0.0) const;

    friend bool operator==(const IntervalVector &a, const IntervalVector &b)
    {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    Vec lo_;
    Vec hi_;
};

/// An axis-aligned hyper-rectangle in state space.
using Box = IntervalVector;

class IntervalMatrix
{
public:
    IntervalMatrix() = default;
    IntervalMatrix(Mat lo, Mat hi);

    Eigen::Index rows() const { return lo_.rows(); }
    Eigen::Index cols() const { return lo_.cols(); }
    const Mat &lo() const { return lo_; }
    const Mat &hi() const { return hi_; }
    Interval operator()(Eigen::Index r, Eigen::Index c) const { return Interval(lo_(r, c), hi_(r, c)); }

private:
    Mat lo_;
    Mat hi_;
};

// Elementwise max(M, 0) and min(M, 0).
Mat posPart(const Mat &m);
Mat negPart(const Mat &m);

/// Exact range of W x + b over x in the box.
IntervalVector intervalAffineEval(const Mat &w, const Vec &b, const Box &box);

/// Upper bound on g^T v for g in `grad`, v in `f`, built from the sign
/// decomposition of both endpoint vectors. Exact when every component is
/// sign-definite; an over-approximation when a component straddles zero.
double innerProductUpper(const IntervalVector &grad, const IntervalVector &f);

} // namespace ncbf
