#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "cdcv/backtest.hpp"
#include "cdcv/cvine.hpp"
#include "cdcv/model.hpp"
#include "json.hpp"

namespace cdcv {

using Json = nlohmann::ordered_json;

/// Version tag written into every top-level document.
inline constexpr int kSchemaVersion = 1;

void to_json(Json& j, const MarginalFit& f);
void from_json(const Json& j, MarginalFit& f);
void to_json(Json& j, const BivariateCopulaFit& f);
void from_json(const Json& j, BivariateCopulaFit& f);
void to_json(Json& j, const ClusterPartition& p);
void from_json(const Json& j, ClusterPartition& p);
void to_json(Json& j, const IndexSeries& s);
void from_json(const Json& j, IndexSeries& s);
void to_json(Json& j, const JointCopulaFit& f);
void from_json(const Json& j, JointCopulaFit& f);
void to_json(Json& j, const CVineModel& m);
void from_json(const Json& j, CVineModel& m);
void to_json(Json& j, const CdcvConfig& c);
void from_json(const Json& j, CdcvConfig& c);
void to_json(Json& j, const CdcvModel& m);
void from_json(const Json& j, CdcvModel& m);
void to_json(Json& j, const RhoSummary& s);
void to_json(Json& j, const ConditioningDiagnostics& d);
void to_json(Json& j, const VaRBacktestReport& r);
void to_json(Json& j, const SelectionRow& r);

/// Parses a model document and validates its structure. Throws InputError.
CdcvModel model_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace cdcv
