#pragma once

#include <string>

#include <json.hpp>

#include "pvass/decide.hpp"
#include "pvass/graph.hpp"
#include "pvass/model.hpp"
#include "pvass/oracle.hpp"
#include "pvass/scheme.hpp"
#include "pvass/simulate.hpp"

namespace pvass {

using ReportJson = nlohmann::ordered_json;

// FNV-1a over the canonical serialization; stable across runs.
std::string model_digest(const Model& model);

ReportJson verdict_report(const Model& model, const Verdict& verdict);
ReportJson mec_report(const Model& model);
ReportJson increments_report(const Model& model, std::uint64_t cap = kDefaultStrategyCap);
ReportJson scheme_report(const Model& model, std::int64_t n,
                         std::uint64_t cap = kDefaultStrategyCap);

ReportJson certificate_to_json(const RankingCertificate& cert);
RankingCertificate certificate_from_json(const std::string& text);

// Renders reports deterministically; "text" pretty-prints, "canonical" is
// the compact single-line encoding.
std::string render_report(const ReportJson& report, const std::string& format);

std::string stats_to_csv(const SimStats& stats);

}  // namespace pvass
