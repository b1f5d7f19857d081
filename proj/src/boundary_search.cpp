#include "ncbf/boundary_search.hpp"

#include "ncbf/parallel.hpp"

#include <stdexcept>
#include <string>

namespace ncbf {

GridSpec GridSpec::uniform(const Box &domain, int cells)
{
    return GridSpec{domain, std::vector<int>(static_cast<std::size_t>(domain.size()), cells)};
}

void GridSpec::validate() const
{
    if (static_cast<Eigen::Index>(cellsPerDim.size()) != domain.size())
        throw DimensionError("GridSpec: " + std::to_string(cellsPerDim.size()) + " resolutions for a " +
                             std::to_string(domain.size()) + "-D domain");
    for (int c : cellsPerDim)
        if (c <= 0)
            throw std::invalid_argument("GridSpec: cells per dimension must be positive");
    if ((domain.width().array() <= 0.0).any())
        throw std::invalid_argument("GridSpec: domain must have positive width in every dimension");
}

std::size_t GridSpec::cellCount() const
{
    std::size_t n = 1;
    for (int c : cellsPerDim)
        n *= static_cast<std::size_t>(c);
    return n;
}

double GridSpec::coordinate(Eigen::Index d, int i) const
{
    const int c = cellsPerDim[static_cast<std::size_t>(d)];
    if (i == c)
        return domain.hi()[d];
    return domain.lo()[d] + (domain.hi()[d] - domain.lo()[d]) * i / c;
}

Box GridSpec::cell(const std::vector<int> &index) const
{
    const Eigen::Index n = domain.size();
    Vec lo(n), hi(n);
    for (Eigen::Index d = 0; d < n; ++d) {
        lo[d] = coordinate(d, index[static_cast<std::size_t>(d)]);
        hi[d] = coordinate(d, index[static_cast<std::size_t>(d)] + 1);
    }
    return Box(std::move(lo), std::move(hi));
}

SubregionCover searchBoundary(const MlpNetwork &net, const GridSpec &grid, const BoundaryOptions &opts)
{
    if (grid.domain.size() != net.inputDim())
        throw DimensionError("searchBoundary: grid dimension " + std::to_string(grid.domain.size()) +
                             " != network input " + std::to_string(net.inputDim()));
    return searchBoundary([&net](const Vec &x) { return net.forward(x); }, grid, opts);
}

SubregionCover searchBoundary(const std::function<double(const Vec &)> &h, const GridSpec &grid,
                              const BoundaryOptions &opts)
{
    grid.validate();
    const Eigen::Index n = grid.domain.size();
    const auto dims = static_cast<std::size_t>(n);
    if (grid.cellCount() == 0)
        throw std::invalid_argument("searchBoundary: grid has zero cells");

    // Row-major strides over the (c+1)^n vertex lattice and the c^n cells.
    std::vector<std::size_t> vStride(dims), cStride(dims);
    std::size_t vCount = 1, cCount = 1;
    for (std::size_t d = dims; d-- > 0;) {
        vStride[d] = vCount;
        cStride[d] = cCount;
        vCount *= static_cast<std::size_t>(grid.cellsPerDim[d] + 1);
        cCount *= static_cast<std::size_t>(grid.cellsPerDim[d]);
    }

    std::vector<double> vertexValue(vCount);
    detail::parallelFor(vCount, opts.workers, [&](std::size_t flat) {
        Vec x(n);
        std::size_t rem = flat;
        for (std::size_t d = 0; d < dims; ++d) {
            const auto i = static_cast<int>(rem / vStride[d]);
            rem %= vStride[d];
            x[static_cast<Eigen::Index>(d)] = grid.coordinate(static_cast<Eigen::Index>(d), i);
        }
        vertexValue[flat] = h(x);
    });

    const std::size_t corners = std::size_t{1} << dims;
    std::vector<char> keep(cCount, 0);
    detail::parallelFor(cCount, opts.workers, [&](std::size_t cell) {
        std::vector<int> idx(dims);
        std::size_t rem = cell;
        std::size_t base = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            idx[d] = static_cast<int>(rem / cStride[d]);
            rem %= cStride[d];
            base += static_cast<std::size_t>(idx[d]) * vStride[d];
        }
        bool anyNonPos = false, anyNonNeg = false;
        for (std::size_t c = 0; c < corners; ++c) {
            std::size_t v = base;
            for (std::size_t d = 0; d < dims; ++d)
                if ((c >> d) & 1u)
                    v += vStride[d];
            anyNonPos |= vertexValue[v] <= 0.0;
            anyNonNeg |= vertexValue[v] >= 0.0;
        }
        bool retain = anyNonPos && anyNonNeg;
        if (!retain && opts.midpointCheck) {
            const double hm = h(grid.cell(idx).mid());
            // vertices share one strict sign; keep if the centre disagrees
            retain = anyNonPos ? hm >= 0.0 : hm <= 0.0;
        }
        keep[cell] = retain ? 1 : 0;
    });

    SubregionCover cover{{}, grid};
    std::vector<int> idx(dims);
    for (std::size_t cell = 0; cell < cCount; ++cell) {
        if (!keep[cell])
            continue;
        std::size_t rem = cell;
        for (std::size_t d = 0; d < dims; ++d) {
            idx[d] = static_cast<int>(rem / cStride[d]);
            rem %= cStride[d];
        }
        cover.regions.push_back(grid.cell(idx));
    }
    return cover;
}

} // namespace ncbf
