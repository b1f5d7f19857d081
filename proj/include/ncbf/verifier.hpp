#pragma once

#include "ncbf/boundary_search.hpp"
#include "ncbf/bounders.hpp"
#include "ncbf/dynamics.hpp"
#include "ncbf/network.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ncbf {

struct VerifierConfig
{
    double alpha = 0.0; // linear class-K gain
    int maxSplits = 3;  // split budget per initial region
    Bounder bounder = Bounder::LightCrown;
    GridSpec grid;
    unsigned workers = 1;
    bool keepGoing = false; // process every region even after a failure
    bool midpointCheck = false;

    void validate() const;
};

/// Network-side bounds over a region; independent of the control input.
struct NetworkRegionBounds
{
    IntervalVector gradient;
    Interval output;
};

NetworkRegionBounds networkRegionBounds(const MlpNetwork &net, const Box &region, Bounder bounder);

/// Upper bound of grad h^T f(x, u) + alpha h(x) over the region for one control.
double lieUpperBound(const SystemModel &sys, const NetworkRegionBounds &nb, const Box &region, const Vec &u,
                     double alpha);

struct SubregionCheck
{
    bool satisfied;
    double lhs;
};

SubregionCheck checkSubregion(const SystemModel &sys, const MlpNetwork &net, const Box &region, const Vec &u,
                              double alpha, Bounder bounder);

/// Bisects every dimension at its midpoint. Child k takes the upper half of
/// dimension d iff bit d of k is set.
std::vector<Box> splitRegion(const Box &region);

/// A leaf box certified with a single control vertex.
struct LeafCertificate
{
    Box region;
    Vec witness;
    double lhs;
};

enum class RegionVerdict { Verified, Failed };

struct SubregionResult
{
    Box region;
    RegionVerdict verdict = RegionVerdict::Failed;
    // Set when the region verified without splitting.
    std::optional<Vec> witnessControl;
    // Verified: the largest certified lhs over all leaves. Failed: best lhs on the failing leaf.
    double bestLhs = 0.0;
    int splitsUsed = 0;
    std::vector<LeafCertificate> leaves;
    std::optional<Box> failedLeaf;
};

SubregionResult verifyRegion(const SystemModel &sys, const MlpNetwork &net, const Box &region,
                             const VerifierConfig &cfg);

enum class Verdict { Safe, Unsafe };

struct VerificationReport
{
    Verdict verdict = Verdict::Safe;
    double verifiedRate = 1.0;
    std::size_t regionsTotal = 0;
    std::size_t regionsVerified = 0;
    std::size_t regionsProcessed = 0;
    double wallTimeS = 0.0;
    std::vector<SubregionResult> results; // initial-cover order
    std::optional<Box> failingRegion;
    double failingLhs = 0.0;
    std::vector<std::string> warnings;
};

/// Boundary search followed by per-region branch-and-bound certification.
/// The report is identical for any worker count except for wall time.
VerificationReport verify(const SystemModel &sys, const MlpNetwork &net, const VerifierConfig &cfg);

/// Same, on an explicit cover.
VerificationReport verifyCover(const SystemModel &sys, const MlpNetwork &net, const SubregionCover &cover,
                               const VerifierConfig &cfg);

/// Samples points uniformly in every certified leaf and counts points where
/// grad h(x)^T f(x, u*) + alpha h(x) exceeds the certified lhs by more than `slack`.
struct AuditResult
{
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worstExcess = -std::numeric_limits<double>::infinity();
};

AuditResult auditCertificates(const SystemModel &sys, const MlpNetwork &net, const VerificationReport &report,
                              double alpha, std::size_t samplesPerLeaf, std::uint64_t seed, double slack = 1e-6);

std::string verdictName(Verdict v);

} // namespace ncbf
