// Command-line driver: boundary search, verification runs and bounder/alpha sweeps.
//
// Exit codes: 0 safe (or success), 1 unsafe, 2 usage/config error, 3 internal error.

#include "ncbf/boundary_search.hpp"
#include "ncbf/dynamics.hpp"
#include "ncbf/network.hpp"
#include "ncbf/report.hpp"
#include "ncbf/verifier.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode { kSafe = 0, kUnsafe = 1, kUsage = 2, kInternal = 3 };

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Options
{
    std::string system;
    std::string weights;
    std::vector<double> alphas{0.0};
    std::vector<int> grid;
    int maxSplits = 3;
    std::vector<std::string> bounders{"lightcrown"};
    unsigned threads = 1;
    bool keepGoing = false;
    bool midpointCheck = false;
    std::string report;
    std::string csv;
    std::string certificates;
    std::uint64_t seed = 0;
    std::size_t selfCheck = 0;
    std::string sysConfig;
};

void addCommon(CLI::App *cmd, Options &o)
{
    cmd->add_option("--system", o.system, "pendulum | dubins | quadrotor")
        ->required()
        ->check(CLI::IsMember({"pendulum", "dubins", "quadrotor"}));
    cmd->add_option("--weights", o.weights, "network weight file (JSON)")->required();
    cmd->add_option("--grid", o.grid, "cells per dimension; one value applies to all dimensions")
        ->delimiter(',')
        ->required();
    cmd->add_option("--sys-config", o.sysConfig, "JSON file overriding system parameters, domain and controls");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--midpoint-check", o.midpointCheck, "also keep cells whose centre sign disagrees with the vertices");
    cmd->add_option("--seed", o.seed, "seed for sampling-based self-checks");
}

void addVerification(CLI::App *cmd, Options &o)
{
    cmd->add_option("--alpha", o.alphas, "class-K gain(s)")->delimiter(',');
    cmd->add_option("--max-splits", o.maxSplits, "split budget per initial region")->check(CLI::NonNegativeNumber);
    cmd->add_option("--bounder", o.bounders, "lightcrown | baseline")->delimiter(',');
    cmd->add_flag("--keep-going", o.keepGoing, "keep verifying after the first failing region");
    cmd->add_option("--self-check", o.selfCheck, "sample this many points per certified leaf and re-check");
}

json manifestOf(const std::string &command, const Options &o)
{
    return {{"command", command},
            {"system", o.system},
            {"weights", o.weights},
            {"sys_config", o.sysConfig},
            {"alpha", o.alphas},
            {"grid", o.grid},
            {"max_splits", o.maxSplits},
            {"bounder", o.bounders},
            {"keep_going", o.keepGoing},
            {"midpoint_check", o.midpointCheck},
            {"seed", o.seed},
            {"self_check", o.selfCheck}};
}

struct Problem
{
    std::unique_ptr<ncbf::SystemModel> sys;
    std::optional<ncbf::MlpNetwork> net;
    ncbf::GridSpec grid;
};

Problem loadProblem(const Options &o)
{
    if (!fs::exists(o.weights))
        throw ConfigError("weight file not found: " + o.weights);
    if (!o.sysConfig.empty() && !fs::exists(o.sysConfig))
        throw ConfigError("system config not found: " + o.sysConfig);
    for (double a : o.alphas)
        if (!(a >= 0.0))
            throw ConfigError("alpha must be non-negative (got " + std::to_string(a) + ")");

    Problem p;
    try {
        p.sys = ncbf::makeSystem(o.system, o.sysConfig);
        p.net = ncbf::loadWeights(o.weights);
    } catch (const std::exception &e) {
        throw ConfigError(e.what());
    }
    const auto n = static_cast<std::size_t>(p.sys->stateDim());
    if (static_cast<std::size_t>(p.net->inputDim()) != n)
        throw ConfigError("network input dimension " + std::to_string(p.net->inputDim()) + " does not match " +
                          o.system + " state dimension " + std::to_string(n));
    std::vector<int> cells = o.grid;
    if (cells.size() == 1)
        cells.assign(n, cells.front());
    if (cells.size() != n)
        throw ConfigError("--grid needs 1 or " + std::to_string(n) + " values");
    for (int c : cells)
        if (c <= 0)
            throw ConfigError("--grid values must be positive");
    p.grid = ncbf::GridSpec{p.sys->domain(), cells};
    return p;
}

void writeText(const std::string &path, const std::string &text)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path);
    out << text;
}

ncbf::VerifierConfig makeConfig(const Options &o, const Problem &p, double alpha, const std::string &bounder)
{
    ncbf::VerifierConfig cfg;
    cfg.alpha = alpha;
    cfg.maxSplits = o.maxSplits;
    try {
        cfg.bounder = ncbf::parseBounder(bounder);
    } catch (const std::exception &e) {
        throw ConfigError(e.what());
    }
    if (cfg.bounder == ncbf::Bounder::Baseline && p.net->activation() != ncbf::Activation::Tanh)
        throw ConfigError("the baseline bounder supports tanh networks only");
    cfg.grid = p.grid;
    cfg.workers = o.threads;
    cfg.keepGoing = o.keepGoing;
    cfg.midpointCheck = o.midpointCheck;
    return cfg;
}

int cmdVerify(const Options &o)
{
    if (o.alphas.size() != 1 || o.bounders.size() != 1)
        throw ConfigError("verify takes a single --alpha and a single --bounder (use compare for sweeps)");
    const Problem p = loadProblem(o);
    const ncbf::VerifierConfig cfg = makeConfig(o, p, o.alphas.front(), o.bounders.front());

    const ncbf::VerificationReport report = ncbf::verify(*p.sys, *p.net, cfg);
    json doc = ncbf::reportToJson(report, cfg, o.system, manifestOf("verify", o));
    if (o.selfCheck > 0) {
        const auto audit = ncbf::auditCertificates(*p.sys, *p.net, report, cfg.alpha, o.selfCheck, o.seed);
        doc["self_check"] = {{"samples", audit.samples}, {"violations", audit.violations}};
        if (audit.violations > 0)
            std::cerr << "self-check: " << audit.violations << " sampled violations\n";
    }
    if (!o.report.empty())
        writeText(o.report, doc.dump(2) + "\n");
    if (!o.certificates.empty())
        writeText(o.certificates, ncbf::certificatesToJson(report).dump() + "\n");
    if (!o.csv.empty())
        writeText(o.csv, "# manifest " + manifestOf("verify", o).dump() + "\n" + ncbf::csvHeader() + "\n" +
                             ncbf::csvRow(report, cfg, o.system) + "\n");

    for (const auto &w : report.warnings)
        std::cerr << "warning: " << w << '\n';
    std::cout << ncbf::verdictName(report.verdict) << " rate=" << report.verifiedRate << " ("
              << report.regionsVerified << "/" << report.regionsTotal << ") time=" << report.wallTimeS
              << "s bounder=" << ncbf::bounderName(cfg.bounder) << '\n';
    return report.verdict == ncbf::Verdict::Safe ? kSafe : kUnsafe;
}

int cmdCompare(Options o)
{
    // Rates are only comparable if every region gets processed.
    o.keepGoing = true;
    const Problem p = loadProblem(o);
    std::ostringstream csv;
    csv << "# manifest " << manifestOf("compare", o).dump() << '\n' << ncbf::csvHeader() << '\n';
    for (const auto &b : o.bounders) {
        for (double a : o.alphas) {
            const ncbf::VerifierConfig cfg = makeConfig(o, p, a, b);
            const auto report = ncbf::verify(*p.sys, *p.net, cfg);
            const std::string row = ncbf::csvRow(report, cfg, o.system);
            csv << row << '\n';
            std::cout << row << std::endl;
        }
    }
    if (!o.csv.empty())
        writeText(o.csv, csv.str());
    return kSafe;
}

int cmdBoundary(const Options &o)
{
    const Problem p = loadProblem(o);
    const auto cover = ncbf::searchBoundary(*p.net, p.grid, {o.midpointCheck, o.threads});
    std::ostringstream out;
    out << json{{"manifest", manifestOf("boundary", o)}, {"cells", cover.regions.size()}}.dump() << '\n';
    for (const auto &r : cover.regions)
        out << ncbf::boxToJson(r).dump() << '\n';
    if (o.report.empty())
        std::cout << out.str();
    else
        writeText(o.report, out.str());
    if (cover.regions.empty())
        std::cerr << "warning: empty boundary cover: h does not change sign on the grid\n";
    std::cerr << cover.regions.size() << " boundary cells of " << p.grid.cellCount() << '\n';
    return kSafe;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Certify neural control barrier functions over a gridded state domain"};
    app.require_subcommand(1);

    Options opts;
    auto *verify = app.add_subcommand("verify", "run the verifier and write a JSON report");
    addCommon(verify, opts);
    addVerification(verify, opts);
    verify->add_option("--report", opts.report, "report output path (JSON)");
    verify->add_option("--csv", opts.csv, "summary row output path (CSV)");
    verify->add_option("--certificates", opts.certificates, "per-leaf certificates output path (JSON)");

    auto *compare = app.add_subcommand("compare", "sweep bounders x alphas and emit CSV");
    addCommon(compare, opts);
    addVerification(compare, opts);
    compare->add_option("--csv", opts.csv, "CSV output path");

    auto *boundary = app.add_subcommand("boundary", "write boundary-covering cells as JSON lines");
    addCommon(boundary, opts);
    boundary->add_option("--report,--out", opts.report, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (verify->parsed())
            return cmdVerify(opts);
        if (compare->parsed())
            return cmdCompare(opts);
        return cmdBoundary(opts);
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}
