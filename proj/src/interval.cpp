#include "ncbf/interval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncbf {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi)
{
    if (!(lo <= hi))
        throw std::invalid_argument("Interval: lo (" + std::to_string(lo) + ") > hi (" +
                                    std::to_string(hi) + ")");
}

Interval operator+(const Interval &a, const Interval &b)
{
    return Interval(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval operator-(const Interval &a, const Interval &b)
{
    return Interval(a.lo() - b.hi(), a.hi() - b.lo());
}

Interval operator*(const Interval &a, const Interval &b)
{
    const double p[] = {a.lo() * b.lo(), a.lo() * b.hi(), a.hi() * b.lo(), a.hi() * b.hi()};
    return Interval(*std::min_element(p, p + 4), *std::max_element(p, p + 4));
}

Interval operator*(double s, const Interval &a)
{
    return s >= 0.0 ? Interval(s * a.lo(), s * a.hi()) : Interval(s * a.hi(), s * a.lo());
}

IntervalVector::IntervalVector(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi))
{
    if (lo_.size() != hi_.size())
        throw DimensionError("IntervalVector: endpoint sizes differ");
    for (Eigen::Index i = 0; i < lo_.size(); ++i)
        if (!(lo_[i] <= hi_[i]))
            throw std::invalid_argument("IntervalVector: lo > hi at component " + std::to_string(i));
}

IntervalVector::IntervalVector(const std::vector<Interval> &components)
    : lo_(static_cast<Eigen::Index>(components.size())), hi_(static_cast<Eigen::Index>(components.size()))
{
    for (std::size_t i = 0; i < components.size(); ++i) {
        lo_[static_cast<Eigen::Index>(i)] = components[i].lo();
        hi_[static_cast<Eigen::Index>(i)] = components[i].hi();
    }
}

double IntervalVector::volume() const
{
    return (hi_ - lo_).prod();
}

bool IntervalVector::contains(const Vec &x, double slack) const
{
    if (x.size() != size())
        throw DimensionError("IntervalVector::contains: dimension mismatch");
    return ((x.array() >= lo_.array() - slack) && (x.array() <= hi_.array() + slack)).all();
}

bool IntervalVector::contains(const IntervalVector &other, double slack) const
{
    if (other.size() != size())
        throw DimensionError("IntervalVector::contains: dimension mismatch");
    return ((other.lo_.array() >= lo_.array() - slack) && (other.hi_.array() <= hi_.array() + slack)).all();
}

IntervalMatrix::IntervalMatrix(Mat lo, Mat hi) : lo_(std::move(lo)), hi_(std::move(hi))
{
    if (lo_.rows() != hi_.rows() || lo_.cols() != hi_.cols())
        throw DimensionError("IntervalMatrix: endpoint shapes differ");
    if ((lo_.array() > hi_.array()).any())
        throw std::invalid_argument("IntervalMatrix: lo > hi");
}

Mat posPart(const Mat &m)
{
    return m.cwiseMax(0.0);
}

Mat negPart(const Mat &m)
{
    return m.cwiseMin(0.0);
}

IntervalVector intervalAffineEval(const Mat &w, const Vec &b, const Box &box)
{
    if (w.cols() != box.size())
        throw DimensionError("intervalAffineEval: W has " + std::to_string(w.cols()) +
                             " columns, box has dimension " + std::to_string(box.size()));
    if (w.rows() != b.size())
        throw DimensionError("intervalAffineEval: bias size does not match W rows");

    const Mat wp = posPart(w);
    const Mat wn = negPart(w);
    Vec lo = wp * box.lo() + wn * box.hi() + b;
    Vec hi = wp * box.hi() + wn * box.lo() + b;
    return IntervalVector(std::move(lo), std::move(hi));
}

double innerProductUpper(const IntervalVector &grad, const IntervalVector &f)
{
    if (grad.size() != f.size())
        throw DimensionError("innerProductUpper: dimension mismatch");

    const Vec gUp = grad.hi().cwiseMax(0.0);
    const Vec gUn = grad.hi().cwiseMin(0.0);
    const Vec gLp = grad.lo().cwiseMax(0.0);
    const Vec gLn = grad.lo().cwiseMin(0.0);
    const Vec fUp = f.hi().cwiseMax(0.0);
    const Vec fUn = f.hi().cwiseMin(0.0);
    const Vec fLp = f.lo().cwiseMax(0.0);
    const Vec fLn = f.lo().cwiseMin(0.0);

    return gUp.dot(fUp) + gLp.dot(fUn) + gUn.dot(fLp) + gLn.dot(fLn);
}

} // namespace ncbf
