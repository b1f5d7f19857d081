#pragma once

#include "ncbf/verifier.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace ncbf {

/// Report document: verdict, rates, timing, configuration, failures and the
/// run manifest. `wall_time_s` is the only field that varies between
/// identical runs.
nlohmann::json reportToJson(const VerificationReport &report, const VerifierConfig &cfg,
                            const std::string &systemName, const nlohmann::json &manifest = nullptr);

/// Per-leaf certificates (box, witness control, lhs) for offline re-checking.
nlohmann::json certificatesToJson(const VerificationReport &report);

std::string csvHeader();
std::string csvRow(const VerificationReport &report, const VerifierConfig &cfg, const std::string &systemName);

nlohmann::json boxToJson(const Box &b);

} // namespace ncbf
