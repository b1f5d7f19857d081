#include "ncbf/report.hpp"

#include <sstream>

namespace ncbf {

using nlohmann::json;

namespace {

json vecToJson(const Vec &v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

} // namespace

json boxToJson(const Box &b)
{
    return {{"lo", vecToJson(b.lo())}, {"hi", vecToJson(b.hi())}};
}

json reportToJson(const VerificationReport &report, const VerifierConfig &cfg, const std::string &systemName,
                  const json &manifest)
{
    json failures = json::array();
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        const auto &r = report.results[i];
        if (r.verdict != RegionVerdict::Failed)
            continue;
        const Box &box = r.failedLeaf ? *r.failedLeaf : r.region;
        failures.push_back({{"region_index", i},
                            {"box_lo", vecToJson(box.lo())},
                            {"box_hi", vecToJson(box.hi())},
                            {"best_lhs", r.bestLhs}});
    }

    std::size_t leaves = 0, splits = 0;
    for (const auto &r : report.results) {
        leaves += r.leaves.size();
        splits += static_cast<std::size_t>(r.splitsUsed);
    }

    json doc;
    doc["verdict"] = verdictName(report.verdict);
    doc["verified_rate"] = report.verifiedRate;
    doc["regions_total"] = report.regionsTotal;
    doc["regions_verified"] = report.regionsVerified;
    doc["regions_processed"] = report.regionsProcessed;
    doc["leaves_certified"] = leaves;
    doc["splits_total"] = splits;
    doc["wall_time_s"] = report.wallTimeS;
    doc["system"] = systemName;
    doc["alpha"] = cfg.alpha;
    doc["bounder"] = std::string(bounderName(cfg.bounder));
    doc["max_splits"] = cfg.maxSplits;
    doc["grid"] = cfg.grid.cellsPerDim;
    doc["keep_going"] = cfg.keepGoing;
    doc["midpoint_check"] = cfg.midpointCheck;
    if (report.failingRegion)
        doc["r_fail"] = {{"box_lo", vecToJson(report.failingRegion->lo())},
                         {"box_hi", vecToJson(report.failingRegion->hi())},
                         {"best_lhs", report.failingLhs}};
    else
        doc["r_fail"] = nullptr;
    doc["failures"] = std::move(failures);
    doc["warnings"] = report.warnings;
    if (!manifest.is_null())
        doc["manifest"] = manifest;
    return doc;
}

json certificatesToJson(const VerificationReport &report)
{
    json out = json::array();
    for (std::size_t i = 0; i < report.results.size(); ++i)
        for (const auto &leaf : report.results[i].leaves)
            out.push_back({{"region_index", i},
                           {"box_lo", vecToJson(leaf.region.lo())},
                           {"box_hi", vecToJson(leaf.region.hi())},
                           {"witness", vecToJson(leaf.witness)},
                           {"lhs", leaf.lhs}});
    return out;
}

std::string csvHeader()
{
    return "system,bounder,alpha,verified_rate,time_s,regions,regions_verified,verdict";
}

std::string csvRow(const VerificationReport &report, const VerifierConfig &cfg, const std::string &systemName)
{
    std::ostringstream os;
    os.precision(6);
    os << systemName << ',' << bounderName(cfg.bounder) << ',' << cfg.alpha << ',' << report.verifiedRate << ','
       << report.wallTimeS << ',' << report.regionsTotal << ',' << report.regionsVerified << ','
       << verdictName(report.verdict);
    return os.str();
}

} // namespace ncbf
