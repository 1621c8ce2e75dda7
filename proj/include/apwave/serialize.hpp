#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "apwave/branch.hpp"
#include "apwave/reconstruct.hpp"

namespace apwave {

using json = nlohmann::ordered_json;

/// Canonical echo of a pair definition; parsing accepts generator entries as
/// numbers or the symbolic form "sqrt(n)".
json pair_to_json(const AdmissiblePair& pair);
AdmissiblePair pair_from_json(const json& j);

/// {mean, terms:[{coeffs, kind, value}...]} with terms sorted by frequency;
/// bit-stable across runs for golden files.
json trigsum_to_json(const TrigSum& u);
TrigSum trigsum_from_json(const json& j, const BasisPtr& basis);

json params_to_json(const WaveParams& p);
WaveParams params_from_json(const json& j);

json mode_to_json(const ModeId& m);
ModeId mode_from_json(const json& j, const GeneratorBasis& basis,
                      const AdmissiblePair& pair);

json config_to_json(const BranchConfig& cfg);
BranchConfig config_from_json(const json& j);

json point_to_json(const BranchPoint& pt, const WaveParams& p);
BranchPoint point_from_json(const json& j, const BasisPtr& basis);

struct BranchFile {
  WaveParams params;
  BranchConfig config;
  double lambda_star = 0.0;
  std::vector<BranchPoint> points;
};

json branch_to_json(const BranchFile& bf);
BranchFile branch_from_json(const json& j);

json report_to_json(const VerificationReport& rep);
json nonuniqueness_to_json(const NonuniquenessReport& rep);
json almost_periodic_to_json(const AlmostPeriodicReport& rep);

/// CSV projections (numbers printed with %.17g, header row included).
std::string branch_csv(const BranchFile& bf);
std::string modes_csv(const std::vector<ModeId>& modes);
std::string dispersion_csv(const WaveParams& p, const std::vector<ModeId>& modes);
std::string profile_csv(const std::vector<std::pair<double, double>>& rows);

std::string format_double(double v);

/// Whole-file helpers; both throw std::ios_base::failure on I/O errors.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::string json_dump(const json& j);

}  // namespace apwave
