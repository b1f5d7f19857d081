#include "ncbf/report.hpp"
#include "ncbf/verifier.hpp"

#include "../test_support.hpp"

#include <doctest.h>

using namespace ncbf;
using namespace ncbf::testing;

namespace {

const Box kSquare(Vec{{-1.0, -1.0}}, Vec{{1.0, 1.0}});

// h(x) = sign * tanh(x1) + shift
MlpNetwork tanhOfFirst(double sign = 1.0, double shift = 0.0)
{
    Mat w1(1, 2);
    w1 << 1, 0;
    Mat w2(1, 1);
    w2 << sign;
    return MlpNetwork({{w1, Vec::Zero(1)}, {w2, Vec{{shift}}}}, Activation::Tanh);
}

// h(x) = tanh(x1) + tanh(x2) - 0.5
MlpNetwork tanhSum()
{
    return MlpNetwork({{Mat::Identity(2, 2), Vec::Zero(2)}, {Mat::Ones(1, 2), Vec{{-0.5}}}}, Activation::Tanh);
}

AffineSystem constantDrift(const Vec &c)
{
    return AffineSystem("drift", Mat::Zero(2, 2), Mat::Zero(2, 1), c, kSquare, ControlBox(Vec{{-1.0}}, Vec{{1.0}}));
}

VerifierConfig configFor(const Box &domain, int cells)
{
    VerifierConfig cfg;
    cfg.grid = GridSpec::uniform(domain, cells);
    return cfg;
}

} // namespace

TEST_CASE("closed-form single-region checks")
{
    const auto net = tanhOfFirst();
    const Box region(Vec{{-0.5, -0.5}}, Vec{{0.5, 0.5}});
    const double gMin = 1.0 - std::tanh(0.5) * std::tanh(0.5);

    const auto inward = constantDrift(Vec{{-1.0, 0.0}});
    const auto ok = checkSubregion(inward, net, region, Vec{{0.0}}, 0.0, Bounder::LightCrown);
    CHECK(ok.satisfied);
    CHECK(ok.lhs == doctest::Approx(-gMin).epsilon(1e-12));

    const auto outward = constantDrift(Vec{{1.0, 0.0}});
    const auto bad = checkSubregion(outward, net, region, Vec{{0.0}}, 0.0, Bounder::LightCrown);
    CHECK_FALSE(bad.satisfied);
    CHECK(bad.lhs == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha enters through the upper bound of h")
{
    const auto net = tanhOfFirst(1.0, 0.2);
    const Box region(Vec{{0.0, 0.0}}, Vec{{0.5, 0.5}});
    const auto sys = constantDrift(Vec{{-0.05, 0.0}});
    const double hU = std::tanh(0.5) + 0.2;
    const double base = checkSubregion(sys, net, region, Vec{{0.0}}, 0.0, Bounder::LightCrown).lhs;
    CHECK(base < 0.0);
    for (double alpha : {0.01, 0.1, 1.0}) {
        const double lhs = checkSubregion(sys, net, region, Vec{{0.0}}, alpha, Bounder::LightCrown).lhs;
        CHECK(lhs == doctest::Approx(base + alpha * hU).epsilon(1e-12));
    }
    CHECK_FALSE(checkSubregion(sys, net, region, Vec{{0.0}}, 1.0, Bounder::LightCrown).satisfied);
}

TEST_CASE("splitting produces 2^n children in bit order")
{
    const Box parent(Vec{{0.0, 10.0, -4.0}}, Vec{{2.0, 14.0, 0.0}});
    const auto kids = splitRegion(parent);
    REQUIRE(kids.size() == 8);
    double vol = 0.0;
    for (std::size_t k = 0; k < kids.size(); ++k) {
        for (Eigen::Index d = 0; d < 3; ++d) {
            const bool upper = (k >> d) & 1U;
            CHECK(kids[k].lo()[d] == (upper ? parent.mid()[d] : parent.lo()[d]));
            CHECK(kids[k].hi()[d] == (upper ? parent.hi()[d] : parent.mid()[d]));
        }
        vol += kids[k].volume();
    }
    CHECK(vol == doctest::Approx(parent.volume()));
    CHECK_THROWS_AS(splitRegion(Box(Vec{{0.0, 1.0}}, Vec{{1.0, 1.0}})), std::invalid_argument);
}

TEST_CASE("failing region is the first failure in cover order")
{
    // h = -tanh(x1) with x1' = -1 violates the condition everywhere
    const auto net = tanhOfFirst(-1.0);
    const auto sys = constantDrift(Vec{{-1.0, 0.0}});
    auto cfg = configFor(kSquare, 4);
    const auto report = verify(sys, net, cfg);
    CHECK(report.verdict == Verdict::Unsafe);
    const auto cover = searchBoundary(net, cfg.grid);
    REQUIRE(report.failingRegion.has_value());
    // FIFO order with a budget of 3: the root and its first two children are split,
    // so the third child of the root is the first box left without budget
    CHECK(*report.failingRegion == splitRegion(cover.regions.front())[2]);
    CHECK(report.results.front().failedLeaf == report.failingRegion);
    CHECK(report.regionsProcessed == 1);
    CHECK(report.verifiedRate == 0.0);
    CHECK(report.failingLhs > 0.0);

    cfg.keepGoing = true;
    const auto all = verify(sys, net, cfg);
    CHECK(all.regionsProcessed == cover.regions.size());
    CHECK(all.failingRegion == report.failingRegion);
    for (const auto &r : all.results) {
        CHECK(r.verdict == RegionVerdict::Failed);
        CHECK(r.splitsUsed == cfg.maxSplits);
    }
}

TEST_CASE("a simple safe configuration verifies and its certificates hold")
{
    const auto net = tanhSum();
    const auto sys = constantDrift(Vec{{-1.0, -1.0}});
    const auto cfg = configFor(kSquare, 10);
    const auto report = verify(sys, net, cfg);
    CHECK(report.verdict == Verdict::Safe);
    CHECK(report.verifiedRate == 1.0);
    CHECK(report.regionsTotal > 0);
    for (const auto &r : report.results) {
        CHECK(r.verdict == RegionVerdict::Verified);
        CHECK(r.bestLhs <= 0.0);
        CHECK_FALSE(r.leaves.empty());
    }
    const auto audit = auditCertificates(sys, net, report, cfg.alpha, 200, 1);
    CHECK(audit.samples > 0);
    CHECK(audit.violations == 0);
    CHECK(audit.worstExcess <= 0.0);
}

TEST_CASE("empty cover is vacuously safe")
{
    const auto net = tanhOfFirst(1.0, 5.0);
    const auto sys = constantDrift(Vec{{1.0, 0.0}});
    const auto report = verify(sys, net, configFor(kSquare, 8));
    CHECK(report.verdict == Verdict::Safe);
    CHECK(report.verifiedRate == 1.0);
    CHECK(report.regionsTotal == 0);
    CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("reports do not depend on the worker count")
{
    Rng rng(17);
    const auto sys = makePendulum();
    for (int t = 0; t < 3; ++t) {
        const auto net = randomNet(rng, 2, {8, 8}, Activation::Tanh);
        for (bool keepGoing : {false, true}) {
            auto cfg = configFor(sys->domain(), 12);
            cfg.keepGoing = keepGoing;
            cfg.maxSplits = 1;
            cfg.workers = 1;
            const auto a = verify(*sys, net, cfg);
            cfg.workers = 4;
            const auto b = verify(*sys, net, cfg);
            CHECK(a.verdict == b.verdict);
            CHECK(a.verifiedRate == b.verifiedRate);
            CHECK(a.failingRegion == b.failingRegion);
            REQUIRE(a.results.size() == b.results.size());
            for (std::size_t i = 0; i < a.results.size(); ++i) {
                CHECK(a.results[i].region == b.results[i].region);
                CHECK(a.results[i].verdict == b.results[i].verdict);
                CHECK(a.results[i].bestLhs == b.results[i].bestLhs);
            }
            auto ja = reportToJson(a, cfg, "pendulum");
            auto jb = reportToJson(b, cfg, "pendulum");
            ja.erase("wall_time_s");
            jb.erase("wall_time_s");
            CHECK(ja == jb);
        }
    }
}

TEST_CASE("child regions never get a looser bound than their parent")
{
    Rng rng(29);
    const std::vector<std::unique_ptr<SystemModel>> systems = [] {
        std::vector<std::unique_ptr<SystemModel>> v;
        v.push_back(makePendulum());
        v.push_back(makeDubins());
        return v;
    }();
    for (int t = 0; t < 60; ++t) {
        const auto &sys = *systems[static_cast<std::size_t>(t) % systems.size()];
        const auto net = randomNet(rng, sys.stateDim(), {8}, Activation::Tanh);
        const Box parent = randomSubBox(rng, sys.domain(), 0.2);
        const auto &verts = sys.controls().vertices();
        const Vec u = verts[static_cast<std::size_t>(t) % verts.size()];
        for (Bounder b : {Bounder::LightCrown, Bounder::Baseline}) {
            const double lp = checkSubregion(sys, net, parent, u, 0.5, b).lhs;
            for (const auto &child : splitRegion(parent))
                CHECK(checkSubregion(sys, net, child, u, 0.5, b).lhs <= lp + 1e-9 * std::max(1.0, std::abs(lp)));
        }
    }
}

TEST_CASE("lightcrown is never looser than the baseline")
{
    Rng rng(31);
    const auto sys = makePendulum();
    for (int t = 0; t < 100; ++t) {
        const auto net = randomNet(rng, 2, {uniformInt(rng, 2, 16), uniformInt(rng, 2, 16)}, Activation::Tanh);
        const Box region = randomSubBox(rng, sys->domain(), 0.3);
        const Vec u = sys->controls().vertices()[static_cast<std::size_t>(t % 2)];
        const double light = checkSubregion(*sys, net, region, u, 0.0, Bounder::LightCrown).lhs;
        const double base = checkSubregion(*sys, net, region, u, 0.0, Bounder::Baseline).lhs;
        CHECK(light <= base + 1e-9 * std::max(1.0, std::abs(base)));
    }
}

TEST_CASE("verified rate does not increase with alpha when h is nonnegative on the cover")
{
    // the cover straddles h = 0, so alpha h_U >= 0 on every leaf
    Rng rng(37);
    const auto sys = makePendulum();
    const auto net = randomNet(rng, 2, {16}, Activation::Tanh);
    auto cfg = configFor(sys->domain(), 20);
    cfg.keepGoing = true;
    cfg.maxSplits = 1;
    double prev = 2.0;
    for (double alpha : {0.0, 0.5, 2.0, 10.0}) {
        cfg.alpha = alpha;
        const double rate = verify(*sys, net, cfg).verifiedRate;
        CHECK(rate <= prev);
        prev = rate;
    }
}

TEST_CASE("config validation")
{
    auto cfg = configFor(kSquare, 4);
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha = -0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.alpha = 0.0;
    cfg.maxSplits = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.maxSplits = 0;
    cfg.workers = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("report serialization")
{
    const auto net = tanhSum();
    const auto sys = constantDrift(Vec{{-1.0, -1.0}});
    const auto cfg = configFor(kSquare, 6);
    const auto report = verify(sys, net, cfg);
    const auto j = reportToJson(report, cfg, "drift", {{"seed", 0}});
    for (const char *key : {"verdict", "verified_rate", "regions_total", "wall_time_s", "alpha", "bounder",
                            "max_splits", "grid", "r_fail", "failures", "warnings", "manifest"})
        CHECK(j.contains(key));
    CHECK(j["verdict"] == "SAFE");
    CHECK(j["r_fail"].is_null());

    const std::string row = csvRow(report, cfg, "drift");
    const std::string header = csvHeader();
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));

    const auto certs = certificatesToJson(report);
    CHECK(certs.is_array());
    CHECK(!certs.empty());
}
