#pragma once

#include "ncbf/interval.hpp"
#include "ncbf/network.hpp"

#include <functional>
#include <vector>

namespace ncbf {

/// Uniform grid over a box domain.
struct GridSpec
{
    Box domain;
    std::vector<int> cellsPerDim;

    /// Same resolution in every dimension.
    static GridSpec uniform(const Box &domain, int cells);

    std::size_t cellCount() const;
    void validate() const;

    /// Coordinate of grid line `i` in dimension `d`.
    double coordinate(Eigen::Index d, int i) const;
    Box cell(const std::vector<int> &index) const;
};

struct SubregionCover
{
    std::vector<Box> regions;
    GridSpec grid;
};

struct BoundaryOptions
{
    // Also evaluate h at each cell centre and keep cells whose centre sign disagrees with the vertices.
    bool midpointCheck = false;
    unsigned workers = 1;
};

/// Keeps every grid cell whose vertex values of h are not all of one strict
/// sign (an exact zero counts as a sign change). Cells come back in
/// row-major order, last dimension fastest.
SubregionCover searchBoundary(const MlpNetwork &net, const GridSpec &grid, const BoundaryOptions &opts = {});

SubregionCover searchBoundary(const std::function<double(const Vec &)> &h, const GridSpec &grid,
                              const BoundaryOptions &opts = {});

} // namespace ncbf
