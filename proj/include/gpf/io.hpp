#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "gpf/gaussian.hpp"
#include "gpf/identity_checks.hpp"
#include "gpf/mc_verify.hpp"
#include "gpf/recovery.hpp"
#include "gpf/transform.hpp"

namespace gpf::io {

using nlohmann::json;

// Matrices serialize as row-major nested arrays; unbounded interval ends as
// the string "inf". Parsers report failures through SchemaError carrying a
// JSON-pointer-style location.

json matrix_to_json(const Eigen::MatrixXd& m);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where);
Eigen::VectorXd vector_from_json(const json& j, const std::string& where);

json gaussian_to_json(const GaussianMeasure& g);
GaussianMeasure gaussian_from_json(const json& j, const std::string& where);

json affine_to_json(const AffineMap& m);
AffineMap affine_from_json(const json& j, const std::string& where);

json partition_to_json(const SymmetricProductPartition& p);
SymmetricProductPartition partition_from_json(const json& j,
                                              const std::string& where);

json transform_to_json(const PiecewiseSignOrthogonal& t);
PiecewiseSignOrthogonal transform_from_json(const json& j,
                                            const std::string& where);

json claim_to_json(const PushforwardClaim& c);
PushforwardClaim claim_from_json(const json& j, const std::string& where);
json claim_pair_to_json(const ClaimPair& p);
ClaimPair claim_pair_from_json(const json& j, const std::string& where);

json identity_report_to_json(const IdentityReport& r);
// Deliberately omits the runtime field so serialized reports are replayable
// bit for bit.
json verification_report_to_json(const VerificationReport& r);
json recovery_diagnostics_to_json(const RecoveryDiagnostics& d);

// CSV sample matrices: one point per row, no header, 17 significant digits.
Eigen::MatrixXd read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// FNV-1a 64-bit content digest, hex encoded.
std::string file_digest(const std::filesystem::path& path);

// Every output embeds this block (CSV outputs get a sibling
// <name>.manifest.json since the sample format has no header line).
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  json params = json::object();
  std::map<std::string, std::string> input_digests;
};

json manifest_to_json(const RunManifest& m);

// All CLI writes go through this wrapper so nothing lands outside the
// output directory.
class OutputDir {
 public:
  OutputDir(std::filesystem::path dir, RunManifest manifest);

  const std::filesystem::path& path() const { return dir_; }
  const RunManifest& manifest() const { return manifest_; }

  void write_json(const std::string& name, json j) const;
  void write_csv_with_manifest(const std::string& name,
                               const Eigen::MatrixXd& m) const;

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
};

}  // namespace gpf::io
