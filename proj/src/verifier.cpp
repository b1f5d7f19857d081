#include "ncbf/verifier.hpp"

#include "ncbf/parallel.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

namespace ncbf {

void VerifierConfig::validate() const
{
    if (!(alpha >= 0.0))
        throw std::invalid_argument("alpha must be non-negative, got " + std::to_string(alpha));
    if (maxSplits < 0)
        throw std::invalid_argument("max splits must be non-negative");
    if (workers == 0)
        throw std::invalid_argument("worker count must be at least 1");
}

std::string verdictName(Verdict v)
{
    return v == Verdict::Safe ? "SAFE" : "UNSAFE";
}

NetworkRegionBounds networkRegionBounds(const MlpNetwork &net, const Box &region, Bounder bounder)
{
    const PreactivationBounds pre = preactivationIntervals(net, region);
    const DerivBoundsPerLayer deriv = layerDerivBounds(net, pre, bounder);
    return {jacobianBounds(net, deriv), pre.output};
}

double lieUpperBound(const SystemModel &sys, const NetworkRegionBounds &nb, const Box &region, const Vec &u,
                     double alpha)
{
    const IntervalVector f = concretize(taylorAffineBounds(sys, region, u));
    return innerProductUpper(nb.gradient, f) + alpha * nb.output.hi();
}

SubregionCheck checkSubregion(const SystemModel &sys, const MlpNetwork &net, const Box &region, const Vec &u,
                              double alpha, Bounder bounder)
{
    if (!sys.controls().contains(u))
        throw DynamicsError("checkSubregion: control is not in the admissible box");
    const NetworkRegionBounds nb = networkRegionBounds(net, region, bounder);
    const double lhs = lieUpperBound(sys, nb, region, u, alpha);
    return {lhs <= 0.0, lhs};
}

std::vector<Box> splitRegion(const Box &region)
{
    const Eigen::Index n = region.size();
    if ((region.width().array() <= 0.0).any())
        throw std::invalid_argument("splitRegion: region has a zero-width dimension");
    if (n >= 31)
        throw std::invalid_argument("splitRegion: dimension too large");

    const Vec mid = region.mid();
    const std::size_t count = std::size_t{1} << n;
    std::vector<Box> children;
    children.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Vec lo(n), hi(n);
        for (Eigen::Index d = 0; d < n; ++d) {
            const bool upper = (k >> d) & 1u;
            lo[d] = upper ? mid[d] : region.lo()[d];
            hi[d] = upper ? region.hi()[d] : mid[d];
        }
        children.emplace_back(std::move(lo), std::move(hi));
    }
    return children;
}

SubregionResult verifyRegion(const SystemModel &sys, const MlpNetwork &net, const Box &region,
                             const VerifierConfig &cfg)
{
    SubregionResult result;
    result.region = region;
    result.bestLhs = -std::numeric_limits<double>::infinity();

    const auto &vertices = sys.controls().vertices();
    std::deque<Box> queue{region};
    while (!queue.empty()) {
        Box box = std::move(queue.front());
        queue.pop_front();

        const NetworkRegionBounds nb = networkRegionBounds(net, box, cfg.bounder);
        double best = std::numeric_limits<double>::infinity();
        std::size_t bestIdx = 0;
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            const double lhs = lieUpperBound(sys, nb, box, vertices[v], cfg.alpha);
            if (lhs < best) {
                best = lhs;
                bestIdx = v;
            }
        }

        if (best <= 0.0) {
            result.bestLhs = std::max(result.bestLhs, best);
            result.leaves.push_back({std::move(box), vertices[bestIdx], best});
        } else if (result.splitsUsed < cfg.maxSplits) {
            for (auto &child : splitRegion(box))
                queue.push_back(std::move(child));
            ++result.splitsUsed;
        } else {
            result.verdict = RegionVerdict::Failed;
            result.bestLhs = best;
            result.failedLeaf = std::move(box);
            return result;
        }
    }

    result.verdict = RegionVerdict::Verified;
    if (result.splitsUsed == 0)
        result.witnessControl = result.leaves.front().witness;
    return result;
}

VerificationReport verifyCover(const SystemModel &sys, const MlpNetwork &net, const SubregionCover &cover,
                               const VerifierConfig &cfg)
{
    cfg.validate();
    if (net.inputDim() != sys.stateDim())
        throw DimensionError("verify: network input dimension " + std::to_string(net.inputDim()) +
                             " != system state dimension " + std::to_string(sys.stateDim()));

    const auto start = std::chrono::steady_clock::now();
    VerificationReport report;
    report.regionsTotal = cover.regions.size();

    if (cover.regions.empty()) {
        report.verdict = Verdict::Safe;
        report.verifiedRate = 1.0;
        report.warnings.push_back("empty boundary cover: h does not change sign on the grid");
        report.wallTimeS = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }

    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::optional<SubregionResult>> slots(cover.regions.size());
    std::atomic<std::size_t> firstFail{kNone};

    detail::parallelFor(cover.regions.size(), cfg.workers, [&](std::size_t i) {
        // Without keep-going, anything after the earliest known failure is never reported.
        if (!cfg.keepGoing && i > firstFail.load())
            return;
        slots[i] = verifyRegion(sys, net, cover.regions[i], cfg);
        if (slots[i]->verdict == RegionVerdict::Failed) {
            std::size_t cur = firstFail.load();
            while (i < cur && !firstFail.compare_exchange_weak(cur, i)) {
            }
        }
    });

    const std::size_t failed = firstFail.load();
    const std::size_t stop = (cfg.keepGoing || failed == kNone) ? cover.regions.size() : failed + 1;
    for (std::size_t i = 0; i < stop; ++i) {
        auto &r = *slots[i];
        if (r.verdict == RegionVerdict::Verified) {
            ++report.regionsVerified;
        } else if (!report.failingRegion) {
            report.failingRegion = r.failedLeaf;
            report.failingLhs = r.bestLhs;
        }
        report.results.push_back(std::move(r));
    }
    report.regionsProcessed = report.results.size();
    report.verdict = report.failingRegion ? Verdict::Unsafe : Verdict::Safe;
    report.verifiedRate = static_cast<double>(report.regionsVerified) / static_cast<double>(report.regionsTotal);
    report.wallTimeS = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

VerificationReport verify(const SystemModel &sys, const MlpNetwork &net, const VerifierConfig &cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const SubregionCover cover = searchBoundary(net, cfg.grid, {cfg.midpointCheck, cfg.workers});
    VerificationReport report = verifyCover(sys, net, cover, cfg);
    report.wallTimeS = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

AuditResult auditCertificates(const SystemModel &sys, const MlpNetwork &net, const VerificationReport &report,
                              double alpha, std::size_t samplesPerLeaf, std::uint64_t seed, double slack)
{
    AuditResult audit;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto &r : report.results) {
        for (const auto &leaf : r.leaves) {
            const Box &b = leaf.region;
            for (std::size_t s = 0; s < samplesPerLeaf; ++s) {
                Vec x(b.size());
                for (Eigen::Index d = 0; d < b.size(); ++d)
                    x[d] = b.lo()[d] + unit(rng) * (b.hi()[d] - b.lo()[d]);
                const double value = net.gradient(x).dot(sys.f(x, leaf.witness)) + alpha * net.forward(x);
                const double excess = value - leaf.lhs;
                audit.worstExcess = std::max(audit.worstExcess, excess);
                ++audit.samples;
                if (excess > slack)
                    ++audit.violations;
            }
        }
    }
    return audit;
}

} // namespace ncbf
