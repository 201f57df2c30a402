#include "gpf/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gpf::io {

namespace {

const json& require_field(const json& j, const std::string& key,
                          const std::string& where) {
  if (!j.is_object())
    throw SchemaError("expected an object at " + where, where);
  const auto it = j.find(key);
  if (it == j.end())
    throw SchemaError("missing field " + where + "/" + key, where + "/" + key);
  return *it;
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number())
    throw SchemaError("expected a number at " + where, where);
  return j.get<double>();
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw SchemaError("expected a nonempty array of rows at " + where, where);
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw SchemaError("expected a nonempty row array at " + where + "/0",
                      where + "/0");
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    const std::string row_ptr = where + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].size() != cols)
      throw SchemaError("ragged matrix row at " + row_ptr, row_ptr);
    for (size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number_at(j[i][k], row_ptr + "/" + std::to_string(k));
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw SchemaError("expected a nonempty array at " + where, where);
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        number_at(j[i], where + "/" + std::to_string(i));
  return v;
}

json gaussian_to_json(const GaussianMeasure& g) {
  return json{{"mean", vector_to_json(g.mean())},
              {"cov", matrix_to_json(g.cov().matrix())}};
}

GaussianMeasure gaussian_from_json(const json& j, const std::string& where) {
  const Eigen::VectorXd mean =
      vector_from_json(require_field(j, "mean", where), where + "/mean");
  const Eigen::MatrixXd cov =
      matrix_from_json(require_field(j, "cov", where), where + "/cov");
  try {
    return GaussianMeasure(mean, SpdMatrix(cov));
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid gaussian at ") + where + ": " +
                          e.what(),
                      where);
  }
}

json affine_to_json(const AffineMap& m) {
  return json{{"A", matrix_to_json(m.linear())},
              {"a", vector_to_json(m.shift())}};
}

AffineMap affine_from_json(const json& j, const std::string& where) {
  const Eigen::MatrixXd a =
      matrix_from_json(require_field(j, "A", where), where + "/A");
  const Eigen::VectorXd shift =
      vector_from_json(require_field(j, "a", where), where + "/a");
  try {
    return AffineMap(a, shift);
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid affine map at ") + where + ": " +
                          e.what(),
                      where);
  }
}

json partition_to_json(const SymmetricProductPartition& p) {
  json coords = json::array();
  for (Eigen::Index j = 0; j < p.dim(); ++j) {
    json intervals = json::array();
    for (const auto& iv : p.plus_intervals(j)) {
      json pair = json::array();
      pair.push_back(iv.lo);
      if (iv.hi == interval_infinity())
        pair.push_back("inf");
      else
        pair.push_back(iv.hi);
      intervals.push_back(std::move(pair));
    }
    coords.push_back(json{{"plus_intervals", std::move(intervals)}});
  }
  return json{{"coords", std::move(coords)}};
}

SymmetricProductPartition partition_from_json(const json& j,
                                              const std::string& where) {
  const json& coords = require_field(j, "coords", where);
  if (!coords.is_array() || coords.empty())
    throw SchemaError("expected a nonempty coords array at " + where + "/coords",
                      where + "/coords");
  std::vector<std::vector<Interval>> plus;
  for (size_t c = 0; c < coords.size(); ++c) {
    const std::string cptr = where + "/coords/" + std::to_string(c);
    const json& list = require_field(coords[c], "plus_intervals", cptr);
    if (!list.is_array())
      throw SchemaError("expected an interval array at " + cptr +
                            "/plus_intervals",
                        cptr + "/plus_intervals");
    std::vector<Interval> intervals;
    for (size_t i = 0; i < list.size(); ++i) {
      const std::string iptr =
          cptr + "/plus_intervals/" + std::to_string(i);
      if (!list[i].is_array() || list[i].size() != 2)
        throw SchemaError("expected an [lo, hi] pair at " + iptr, iptr);
      const double lo = number_at(list[i][0], iptr + "/0");
      double hi;
      if (list[i][1].is_string()) {
        if (list[i][1].get<std::string>() != "inf")
          throw SchemaError("unbounded endpoint must be the string \"inf\" at " +
                                iptr + "/1",
                            iptr + "/1");
        hi = interval_infinity();
      } else {
        hi = number_at(list[i][1], iptr + "/1");
      }
      intervals.push_back({lo, hi});
    }
    plus.push_back(std::move(intervals));
  }
  try {
    return SymmetricProductPartition(std::move(plus));
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid partition at ") + where + ": " +
                          e.what(),
                      where);
  }
}

json transform_to_json(const PiecewiseSignOrthogonal& t) {
  json out{{"n", t.dim()},
           {"U", matrix_to_json(t.u().matrix())},
           {"V", matrix_to_json(t.v().matrix())},
           {"partition", partition_to_json(t.partition())}};
  if (t.pre_whiten()) out["sigma0_sqrt"] = matrix_to_json(t.pre_whiten()->matrix());
  if (t.post_color()) out["psi0_sqrt"] = matrix_to_json(t.post_color()->matrix());
  return out;
}

PiecewiseSignOrthogonal transform_from_json(const json& j,
                                            const std::string& where) {
  const json& nj = require_field(j, "n", where);
  if (!nj.is_number_integer() || nj.get<long>() < 1)
    throw SchemaError("field " + where + "/n must be a positive integer",
                      where + "/n");
  const auto n = nj.get<Eigen::Index>();

  const auto read_orthogonal = [&](const char* key) {
    const Eigen::MatrixXd m =
        matrix_from_json(require_field(j, key, where), where + "/" + key);
    if (m.rows() != n)
      throw SchemaError(std::string("matrix ") + key + " has dimension " +
                            std::to_string(m.rows()) + ", expected " +
                            std::to_string(n),
                        where + "/" + key);
    try {
      return OrthogonalMatrix(m);
    } catch (const Error& e) {
      throw SchemaError(std::string("invariant failure for ") + key + ": " +
                            e.what(),
                        where + "/" + key);
    }
  };
  const OrthogonalMatrix u = read_orthogonal("U");
  const OrthogonalMatrix v = read_orthogonal("V");
  SymmetricProductPartition partition = partition_from_json(
      require_field(j, "partition", where), where + "/partition");
  if (partition.dim() != n)
    throw SchemaError("partition has " + std::to_string(partition.dim()) +
                          " coordinates, expected " + std::to_string(n),
                      where + "/partition");

  const auto read_spd = [&](const char* key) -> std::optional<SpdMatrix> {
    if (!j.contains(key)) return std::nullopt;
    const Eigen::MatrixXd m = matrix_from_json(j.at(key), where + "/" + key);
    try {
      return SpdMatrix(m);
    } catch (const Error& e) {
      throw SchemaError(std::string("invariant failure for ") + key + ": " +
                            e.what(),
                        where + "/" + key);
    }
  };
  return PiecewiseSignOrthogonal(u, v, std::move(partition), read_spd("sigma0_sqrt"),
                                 read_spd("psi0_sqrt"));
}

json claim_to_json(const PushforwardClaim& c) {
  return json{{"source", gaussian_to_json(c.source)},
              {"image", gaussian_to_json(c.image)}};
}

PushforwardClaim claim_from_json(const json& j, const std::string& where) {
  return PushforwardClaim(
      gaussian_from_json(require_field(j, "source", where), where + "/source"),
      gaussian_from_json(require_field(j, "image", where), where + "/image"));
}

json claim_pair_to_json(const ClaimPair& p) {
  return json{{"first", claim_to_json(p.first)},
              {"second", claim_to_json(p.second)}};
}

ClaimPair claim_pair_from_json(const json& j, const std::string& where) {
  return ClaimPair(
      claim_from_json(require_field(j, "first", where), where + "/first"),
      claim_from_json(require_field(j, "second", where), where + "/second"));
}

json identity_report_to_json(const IdentityReport& r) {
  json out{
      {"charpoly", {{"pass", r.charpoly.pass}, {"deviation", r.charpoly.deviation}}},
      {"resolvent",
       {{"pass", r.resolvent.pass},
        {"max_deviation", r.resolvent.max_deviation},
        {"probes", r.resolvent.probes}}},
      {"mahalanobis",
       {{"pass", r.mahalanobis.pass}, {"deviation", r.mahalanobis.deviation}}},
      {"det_ratio",
       {{"pass", r.det_ratio.pass}, {"deviation", r.det_ratio.deviation}}},
      {"all_pass", r.all_pass}};
  if (r.density) {
    out["density"] = {{"pass", r.density->pass},
                      {"pair_count", r.density->pair_count},
                      {"median_magnitude", r.density->median_magnitude},
                      {"quantiles",
                       {{"q50", r.density->quantiles.q50},
                        {"q90", r.density->quantiles.q90},
                        {"q99", r.density->quantiles.q99},
                        {"q100", r.density->quantiles.q100}}}};
  }
  json screen = json::array();
  for (const auto& v : r.screen)
    screen.push_back(
        {{"kind", v.kind == ScreenViolationKind::covariance ? "covariance" : "mean"},
         {"deviation", v.deviation}});
  out["screen_violations"] = std::move(screen);
  return out;
}

json verification_report_to_json(const VerificationReport& r) {
  return json{{"mean_ok", r.mean_ok},
              {"max_mean_dev", r.max_mean_dev},
              {"mean_band", r.mean_band},
              {"cov_ok", r.cov_ok},
              {"cov_dev", r.cov_dev},
              {"cov_band", r.cov_band},
              {"mardia_skewness_stat", r.mardia_skewness_stat},
              {"mardia_skewness_p", r.mardia_skewness_p},
              {"mardia_kurtosis_stat", r.mardia_kurtosis_stat},
              {"mardia_kurtosis_p", r.mardia_kurtosis_p},
              {"pass", r.pass}};
}

json recovery_diagnostics_to_json(const RecoveryDiagnostics& d) {
  json cells = json::array();
  for (const auto& [signs, count] : d.sign_cell_counts)
    cells.push_back({{"signs", signs}, {"count", count}});
  return json{{"residual_quantiles",
               {{"q50", d.residual.q50},
                {"q90", d.residual.q90},
                {"q99", d.residual.q99},
                {"q100", d.residual.q100}}},
              {"median_x_norm", d.median_x_norm},
              {"sign_cells", std::move(cells)},
              {"holdout_ok_fraction", d.holdout_ok_fraction},
              {"holdout_count", d.holdout_count},
              {"retained_count", d.retained_count},
              {"discarded_count", d.discarded_count},
              {"tol_rank_used", d.tol_rank_used}};
}

Eigen::MatrixXd read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string(), 0);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    const char* end = p + line.size();
    while (p < end) {
      char* after = nullptr;
      const double value = std::strtod(p, &after);
      if (after == p)
        throw CsvError(path.string() + ": line " + std::to_string(line_no) +
                           ": malformed number",
                       line_no);
      row.push_back(value);
      p = after;
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p < end) {
        if (*p != ',')
          throw CsvError(path.string() + ": line " + std::to_string(line_no) +
                             ": expected a comma",
                         line_no);
        ++p;
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw CsvError(path.string() + ": line " + std::to_string(line_no) +
                         ": expected " + std::to_string(rows.front().size()) +
                         " fields, got " + std::to_string(row.size()),
                     line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(path.string() + ": no data rows", 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows.front().size(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return m;
}

void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, k));
      out << buf;
      if (k + 1 < m.cols()) out << ',';
    }
    out << '\n';
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string(), "");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what(), "");
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for digest");
  std::uint64_t hash = 1469598103934665603ull;  // FNV offset basis
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ull;  // FNV prime
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return "fnv1a:" + os.str();
}

json manifest_to_json(const RunManifest& m) {
  json digests = json::object();
  for (const auto& [name, digest] : m.input_digests) digests[name] = digest;
  return json{{"command", m.command},
              {"seed", m.seed},
              {"params", m.params},
              {"inputs", std::move(digests)}};
}

OutputDir::OutputDir(std::filesystem::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write_json(const std::string& name, json j) const {
  j["manifest"] = manifest_to_json(manifest_);
  write_json_file(dir_ / name, j);
}

void OutputDir::write_csv_with_manifest(const std::string& name,
                                        const Eigen::MatrixXd& m) const {
  write_csv(dir_ / name, m);
  write_json_file(dir_ / (name + ".manifest.json"),
                  json{{"manifest", manifest_to_json(manifest_)}});
}

}  // namespace gpf::io
