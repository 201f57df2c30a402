#include "gpf/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>

#include "gpf/io.hpp"
#include "gpf/rng.hpp"

namespace gpf {

namespace {

namespace fs = std::filesystem;
using io::json;

struct ToleranceSet {
  IdentityTolerances identity{};
  double admissibility = 1e-10;
  double gram = 1e-6;
  RecoveryOptions recovery{};
};

ToleranceSet parse_tol_overrides(const std::string& text) {
  ToleranceSet tol;
  if (text.empty()) return tol;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("--tol-overrides is not valid JSON: ") +
                          e.what(),
                      "");
  }
  if (!j.is_object())
    throw SchemaError("--tol-overrides must be a JSON object", "");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number())
      throw SchemaError("--tol-overrides values must be numbers (" + key + ")",
                        "/" + key);
    const double v = value.get<double>();
    if (key == "charpoly") tol.identity.charpoly = v;
    else if (key == "resolvent") tol.identity.resolvent = v;
    else if (key == "resolvent_pole") tol.identity.resolvent_pole = v;
    else if (key == "mahalanobis") tol.identity.mahalanobis = v;
    else if (key == "det_ratio") tol.identity.det_ratio = v;
    else if (key == "density") tol.identity.density = v;
    else if (key == "screen_eq") tol.identity.screen_eq = v;
    else if (key == "screen_neq") tol.identity.screen_neq = v;
    else if (key == "admissibility") tol.admissibility = v;
    else if (key == "gram") tol.gram = v;
    else if (key == "tol_eps") tol.recovery.tol_eps = v;
    else if (key == "null_guard") tol.recovery.null_guard = v;
    else if (key == "tol_rank_floor") tol.recovery.tol_rank_floor = v;
    else if (key == "rank_noise_factor") tol.recovery.rank_noise_factor = v;
    else if (key == "residual_median_bound") tol.recovery.residual_median_bound = v;
    else if (key == "holdout_rel_err") tol.recovery.holdout_rel_err = v;
    else if (key == "holdout_pass_fraction") tol.recovery.holdout_pass_fraction = v;
    else
      throw SchemaError("unknown tolerance override: " + key, "/" + key);
  }
  return tol;
}

json signs_to_json(const std::vector<SignMatrix>& signs) {
  json out = json::array();
  for (const auto& s : signs) out.push_back(s.to_vector());
  return out;
}

int cmd_construct(const fs::path& spec_path, const fs::path& out,
                  std::uint64_t seed, long check_cells,
                  const ToleranceSet& tol) {
  const json spec = io::read_json_file(spec_path);
  io::RunManifest manifest{"construct", seed,
                           json{{"spec", spec_path.string()},
                                {"check_cells", check_cells}},
                           {{spec_path.string(), io::file_digest(spec_path)}}};
  const io::OutputDir od(out, manifest);

  if (spec.is_object() && spec.contains("partition")) {
    const PiecewiseSignOrthogonal t = io::transform_from_json(spec, "");
    od.write_json("transform.gpt.json", io::transform_to_json(t));

    const auto signs = positive_measure_signs(t);
    json summary{{"n", t.dim()},
                 {"positive_measure_signs", signs_to_json(signs)},
                 {"sign_count", signs.size()},
                 {"orthogonal_ae", t.partition().is_trivial() && t.is_pure()},
                 {"linear_ae", t.partition().is_trivial()}};

    if (spec.contains("admissible_sigmas")) {
      const json& list = spec.at("admissible_sigmas");
      if (!list.is_array())
        throw SchemaError("/admissible_sigmas must be an array",
                          "/admissible_sigmas");
      json push = json::array();
      for (size_t i = 0; i < list.size(); ++i) {
        const std::string where = "/admissible_sigmas/" + std::to_string(i);
        const SpdMatrix sigma(io::matrix_from_json(list[i], where));
        json entry{{"sigma", io::matrix_to_json(sigma.matrix())}};
        try {
          const GaussianMeasure image = exact_pushforward(
              t, GaussianMeasure(Eigen::VectorXd::Zero(sigma.dim()), sigma),
              tol.admissibility);
          entry["admissible"] = true;
          entry["psi"] = io::matrix_to_json(image.cov().matrix());
        } catch (const NotPushforwardClosedError& e) {
          entry["admissible"] = false;
          entry["reason"] = e.what();
        }
        push.push_back(std::move(entry));
      }
      summary["pushforwards"] = std::move(push);
    }

    if (check_cells > 0) {
      const ImageCellReport cells = image_cells(t, check_cells, seed);
      summary["cell_check"] = json{{"points", cells.points_checked},
                                   {"overlaps", cells.overlaps},
                                   {"misses", cells.misses},
                                   {"endpoint_hits", cells.endpoint_hits},
                                   {"cells", cells.cells.size()}};
    }
    od.write_json("summary.json", summary);
    std::cout << "construct: valid transform, n = " << t.dim() << ", "
              << signs.size() << " positive-measure sign cell(s)\n";
    return 0;
  }

  if (spec.is_object() && spec.contains("A")) {
    const AffineMap m = io::affine_from_json(spec, "");
    od.write_json("map.affine.json", io::affine_to_json(m));
    od.write_json("summary.json",
                  json{{"n", m.dim()},
                       {"abs_det", std::abs(m.linear().determinant())}});
    std::cout << "construct: valid affine map, n = " << m.dim() << "\n";
    return 0;
  }

  throw SchemaError(
      "spec is neither a piecewise transform (no \"partition\") nor an affine "
      "map (no \"A\")",
      "");
}

int cmd_apply(const fs::path& transform_path, const fs::path& samples_path,
              const fs::path& out, std::uint64_t seed,
              const std::string& output_name) {
  const json tj = io::read_json_file(transform_path);
  const Eigen::MatrixXd xs = io::read_csv(samples_path);
  io::RunManifest manifest{
      "apply", seed, json{{"transform", transform_path.string()},
                          {"samples", samples_path.string()}},
      {{transform_path.string(), io::file_digest(transform_path)},
       {samples_path.string(), io::file_digest(samples_path)}}};
  const io::OutputDir od(out, manifest);

  Eigen::MatrixXd ys;
  Eigen::Index expected = 0;
  if (tj.is_object() && tj.contains("partition")) {
    const PiecewiseSignOrthogonal t = io::transform_from_json(tj, "");
    expected = t.dim();
    if (xs.cols() != expected)
      throw DimensionError("dimension mismatch at row 1: transform expects " +
                           std::to_string(expected) + " columns, samples have " +
                           std::to_string(xs.cols()));
    ys = apply_rows(t, xs);
  } else if (tj.is_object() && tj.contains("A")) {
    const AffineMap m = io::affine_from_json(tj, "");
    expected = m.dim();
    if (xs.cols() != expected)
      throw DimensionError("dimension mismatch at row 1: map expects " +
                           std::to_string(expected) + " columns, samples have " +
                           std::to_string(xs.cols()));
    ys = apply_rows(m, xs);
  } else {
    throw SchemaError("transform file is neither piecewise nor affine", "");
  }
  od.write_csv_with_manifest(output_name, ys);
  std::cout << "apply: " << ys.rows() << " rows written to "
            << (od.path() / output_name).string() << "\n";
  return 0;
}

int cmd_verify(const std::string& transform_path, const std::string& pairs_path,
               const fs::path& claim_path, const fs::path& out,
               std::uint64_t seed, long sample_count, double alpha, long grid,
               bool dump_samples, const ToleranceSet&) {
  const PushforwardClaim claim =
      io::claim_from_json(io::read_json_file(claim_path), "");

  io::RunManifest manifest{"verify", seed,
                           json{{"claim", claim_path.string()},
                                {"sample_count", sample_count},
                                {"alpha", alpha},
                                {"grid", grid}},
                           {{claim_path.string(), io::file_digest(claim_path)}}};

  const auto start = std::chrono::steady_clock::now();
  VerificationReport report{};
  Eigen::MatrixXd transformed;
  json extra = json::object();
  if (!pairs_path.empty()) {
    manifest.params["pairs"] = pairs_path;
    manifest.input_digests[pairs_path] = io::file_digest(pairs_path);
    const Eigen::MatrixXd all = io::read_csv(pairs_path);
    const Eigen::Index n = claim.source.dim();
    if (all.cols() != 2 * n)
      throw DimensionError("paired samples need " + std::to_string(2 * n) +
                           " columns (x then Tx), got " +
                           std::to_string(all.cols()));
    transformed = all.rightCols(n);
    extra["mode"] = "external-pairs";
    manifest.params["sample_count"] = transformed.rows();
  } else {
    const json tj = io::read_json_file(transform_path);
    manifest.params["transform"] = transform_path;
    manifest.input_digests[transform_path] = io::file_digest(transform_path);
    const VerificationPlan plan(claim, sample_count, seed, alpha);
    const Eigen::MatrixXd xs = sample(claim.source, plan.sample_count, plan.seed);
    if (tj.is_object() && tj.contains("partition")) {
      const PiecewiseSignOrthogonal t = io::transform_from_json(tj, "");
      transformed = apply_rows(t, xs);
      if (grid > 0)
        extra["grid_max_density_dev"] = grid_density_oracle(
            t, claim.source, claim.image,
            GridSpec{static_cast<Eigen::Index>(grid)});
      extra["mode"] = "piecewise";
    } else if (tj.is_object() && tj.contains("A")) {
      const AffineMap m = io::affine_from_json(tj, "");
      transformed = apply_rows(m, xs);
      extra["mode"] = "affine";
    } else {
      throw SchemaError("transform file is neither piecewise nor affine", "");
    }
  }
  report = verify_transformed_samples(transformed, claim.image, alpha);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const io::OutputDir od(out, manifest);
  json rj = io::verification_report_to_json(report);
  rj["alpha"] = alpha;
  rj["sample_count"] = transformed.rows();
  for (auto& [k, v] : extra.items()) rj[k] = v;
  od.write_json("verify_report.json", rj);
  if (dump_samples)
    od.write_csv_with_manifest("transformed_samples.csv", transformed);
  std::cout << "verify: " << (report.pass ? "PASS" : "FAIL")
            << " (mean_ok=" << report.mean_ok << " cov_ok=" << report.cov_ok
            << " skew_p=" << report.mardia_skewness_p
            << " kurt_p=" << report.mardia_kurtosis_p << ") in "
            << report.runtime_seconds << " s\n";
  return report.pass ? 0 : 2;
}

int cmd_identities(const fs::path& claims_path, const std::string& pairs_path,
                   const fs::path& out, std::uint64_t seed,
                   const ToleranceSet& tol) {
  const ClaimPair pair =
      io::claim_pair_from_json(io::read_json_file(claims_path), "");
  io::RunManifest manifest{
      "identities", seed, json{{"claims", claims_path.string()}},
      {{claims_path.string(), io::file_digest(claims_path)}}};

  std::optional<PairedSamples> samples;
  if (!pairs_path.empty()) {
    manifest.params["pairs"] = pairs_path;
    manifest.input_digests[pairs_path] = io::file_digest(pairs_path);
    const Eigen::MatrixXd all = io::read_csv(pairs_path);
    const Eigen::Index n = pair.dim();
    if (all.cols() != 2 * n)
      throw DimensionError("paired samples need " + std::to_string(2 * n) +
                           " columns (x then Tx), got " +
                           std::to_string(all.cols()));
    samples = PairedSamples{all.leftCols(n), all.rightCols(n)};
  }

  const IdentityReport report = run_identity_checks(pair, samples, tol.identity);
  const io::OutputDir od(out, manifest);
  od.write_json("identity_report.json", io::identity_report_to_json(report));
  std::cout << "identities: " << (report.all_pass ? "PASS" : "FAIL")
            << " (charpoly=" << report.charpoly.pass
            << " resolvent=" << report.resolvent.pass
            << " mahalanobis=" << report.mahalanobis.pass
            << " det_ratio=" << report.det_ratio.pass << " density="
            << (report.density ? (report.density->pass ? "1" : "0") : "-")
            << " screen_violations=" << report.screen.size() << ")\n";
  return report.all_pass ? 0 : 2;
}

int cmd_recover(const fs::path& manifest_path, const fs::path& out,
                std::uint64_t seed, const ToleranceSet& tol) {
  const json mj = io::read_json_file(manifest_path);
  const fs::path base = manifest_path.parent_path();
  if (!mj.is_object() || !mj.contains("mode"))
    throw SchemaError("recovery manifest needs a \"mode\" field", "/mode");
  const std::string mode = mj.at("mode").get<std::string>();

  io::RunManifest manifest{
      "recover", seed,
      json{{"manifest", manifest_path.string()}, {"mode", mode}},
      {{manifest_path.string(), io::file_digest(manifest_path)}}};

  const auto read_vectors = [&](const char* key) {
    const json& list = mj.at(key);
    if (!list.is_array() || list.empty())
      throw SchemaError(std::string("/") + key + " must be a nonempty array",
                        std::string("/") + key);
    std::vector<Eigen::VectorXd> vs;
    for (size_t i = 0; i < list.size(); ++i)
      vs.push_back(io::vector_from_json(
          list[i], std::string("/") + key + "/" + std::to_string(i)));
    return vs;
  };

  if (mode == "affine") {
    if (!mj.contains("thetas"))
      throw SchemaError("affine recovery needs /thetas", "/thetas");
    const std::vector<Eigen::VectorXd> thetas = read_vectors("thetas");

    std::vector<Eigen::VectorXd> phis;
    std::optional<SpdMatrix> psi;
    if (mj.contains("datasets")) {
      const json& files = mj.at("datasets");
      if (!files.is_array() || files.size() != thetas.size())
        throw SchemaError("/datasets must list one image-sample CSV per theta",
                          "/datasets");
      Eigen::MatrixXd cov_sum;
      for (size_t i = 0; i < files.size(); ++i) {
        const fs::path f = base / files[i].get<std::string>();
        manifest.input_digests[f.string()] = io::file_digest(f);
        const Eigen::MatrixXd ys = io::read_csv(f);
        const Eigen::RowVectorXd mean = ys.colwise().mean();
        phis.push_back(mean.transpose());
        const Eigen::MatrixXd centered = ys.rowwise() - mean;
        const Eigen::MatrixXd cov = centered.transpose() * centered /
                                    static_cast<double>(ys.rows() - 1);
        cov_sum = (i == 0) ? cov : Eigen::MatrixXd(cov_sum + cov);
      }
      psi = SpdMatrix(cov_sum / static_cast<double>(files.size()));
    } else {
      phis = read_vectors("phis");
      psi = SpdMatrix(io::matrix_from_json(mj.at("psi"), "/psi"));
    }

    AffineMap recovered = [&] {
      if (mj.contains("sigma")) {
        const SpdMatrix sigma(io::matrix_from_json(mj.at("sigma"), "/sigma"));
        return whiten_and_recover(thetas, phis, sigma, *psi);
      }
      return recover_affine(AffineRecoveryInput(thetas, phis, *psi));
    }();

    double map_residual = 0.0;
    for (size_t j = 0; j < thetas.size(); ++j)
      map_residual =
          std::max(map_residual, (recovered.apply(thetas[j]) - phis[j]).norm());

    json diag{{"max_mean_map_residual", map_residual}};
    if (!mj.contains("sigma")) {
      try {
        const OrthogonalMatrix cert = isometry_certificate(
            AffineRecoveryInput(thetas, phis, *psi), tol.gram);
        diag["isometry_certificate"] = io::matrix_to_json(cert.matrix());
      } catch (const NoIsometryError& e) {
        diag["isometry_certificate"] = nullptr;
        diag["isometry_failure"] = e.what();
      }
    }

    const io::OutputDir od(out, manifest);
    od.write_json("recovered.affine.json", io::affine_to_json(recovered));
    od.write_json("diagnostics.json", diag);
    std::cout << "recover (affine): max |T(theta_j) - phi_j| = " << map_residual
              << "\n";
    return 0;
  }

  if (mode == "piecewise") {
    if (!mj.contains("sigmas"))
      throw SchemaError("piecewise recovery needs /sigmas", "/sigmas");
    const json& sig_list = mj.at("sigmas");
    if (!sig_list.is_array() || sig_list.empty())
      throw SchemaError("/sigmas must be a nonempty array", "/sigmas");
    std::vector<SpdMatrix> sigmas;
    for (size_t i = 0; i < sig_list.size(); ++i)
      sigmas.emplace_back(io::matrix_from_json(
          sig_list[i], "/sigmas/" + std::to_string(i)));
    const Eigen::Index n = sigmas[0].dim();

    const auto read_pairs = [&](const fs::path& f) {
      manifest.input_digests[f.string()] = io::file_digest(f);
      const Eigen::MatrixXd all = io::read_csv(f);
      if (all.cols() != 2 * n)
        throw DimensionError(f.string() + ": paired samples need " +
                             std::to_string(2 * n) + " columns");
      return PairedDataset{all.leftCols(n), all.rightCols(n)};
    };

    const json& files = mj.at("datasets");
    if (!files.is_array() || files.size() != sigmas.size())
      throw SchemaError("/datasets must list one pairs CSV per sigma",
                        "/datasets");
    std::vector<PairedDataset> datasets;
    for (const auto& f : files)
      datasets.push_back(read_pairs(base / f.get<std::string>()));
    const PairedDataset identity =
        read_pairs(base / mj.at("identity_pairs").get<std::string>());

    const PiecewiseRecovery rec = recover_piecewise(
        PiecewiseRecoveryInput{std::move(sigmas), std::move(datasets), identity},
        tol.recovery);

    const io::OutputDir od(out, manifest);
    od.write_json("recovered_piecewise.json",
                  json{{"n", n},
                       {"U", io::matrix_to_json(rec.u.matrix())},
                       {"V", io::matrix_to_json(rec.v.matrix())},
                       {"u_dirs", io::matrix_to_json(rec.u_dirs)},
                       {"v_hat", io::matrix_to_json(rec.v_hat)},
                       {"eps_hat", io::vector_to_json(rec.eps_hat)}});
    od.write_json("diagnostics.json",
                  io::recovery_diagnostics_to_json(rec.diagnostics));
    // Per-sample sign assignments: retained pair index followed by the signs.
    Eigen::MatrixXd signs(static_cast<Eigen::Index>(rec.sample_signs.size()),
                          n + 1);
    for (size_t i = 0; i < rec.sample_signs.size(); ++i) {
      signs(static_cast<Eigen::Index>(i), 0) =
          static_cast<double>(rec.retained_indices[i]);
      for (Eigen::Index j = 0; j < n; ++j)
        signs(static_cast<Eigen::Index>(i), j + 1) = rec.sample_signs[i][j];
    }
    od.write_csv_with_manifest("sign_assignments.csv", signs);
    std::cout << "recover (piecewise): median residual "
              << rec.diagnostics.residual.q50 << ", holdout ok fraction "
              << rec.diagnostics.holdout_ok_fraction << "\n";
    return 0;
  }

  throw SchemaError("unknown recovery mode: " + mode, "/mode");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Gaussian pushforward transforms: construction, verification "
               "and recovery",
               "gpf"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::string tol_text;
  app.add_option("--out", out_dir, "output directory (all files land here)");
  auto* seed_opt =
      app.add_option("--seed", seed, "RNG seed (required when sampling)");
  app.add_option("--tol-overrides", tol_text,
                 "JSON object overriding named tolerances");

  auto* construct = app.add_subcommand("construct", "validate and canonicalize "
                                                    "a transform spec");
  std::string spec_path;
  long check_cells = 0;
  construct->add_option("--spec", spec_path, "transform or affine JSON")
      ->required();
  construct->add_option("--check-cells", check_cells,
                        "Monte-Carlo points for the image-cell tiling check");

  auto* apply_cmd = app.add_subcommand("apply", "apply a transform to samples");
  std::string transform_path, samples_path, output_name = "transformed.csv";
  apply_cmd->add_option("--transform", transform_path, "transform JSON file")
      ->required();
  apply_cmd->add_option("--samples", samples_path, "input CSV")->required();
  apply_cmd->add_option("--output-name", output_name, "output CSV name");

  auto* verify = app.add_subcommand("verify", "statistically verify a "
                                              "pushforward claim");
  std::string v_transform, v_pairs, v_claim;
  long v_samples = 200000;
  double v_alpha = 0.01;
  long v_grid = 0;
  verify->add_option("--transform", v_transform, "transform JSON file");
  verify->add_option("--pairs", v_pairs, "pre-transformed pairs CSV (x, Tx)");
  verify->add_option("--claim", v_claim, "claim JSON {source, image}")
      ->required();
  verify->add_option("--samples", v_samples, "Monte-Carlo sample count");
  verify->add_option("--alpha", v_alpha, "normality-test significance level");
  verify->add_option("--grid", v_grid,
                     "also run the exact density grid oracle (nodes per axis)");
  bool v_dump = false;
  verify->add_flag("--dump-samples", v_dump,
                   "write the transformed samples as CSV for external analysis");

  auto* identities = app.add_subcommand(
      "identities", "check the necessary pushforward identities for a claim pair");
  std::string i_claims, i_pairs;
  identities->add_option("--claims", i_claims, "claim pair JSON")->required();
  identities->add_option("--pairs", i_pairs, "optional (x, Tx) pairs CSV");

  auto* recover = app.add_subcommand("recover", "recover a transform from data");
  std::string r_manifest;
  recover->add_option("--manifest", r_manifest, "recovery manifest JSON")
      ->required();

  auto* demo_cmd = app.add_subcommand("demo", "run a reproducible end-to-end "
                                              "scenario");
  std::string scenario;
  demo_cmd->add_option("--scenario", scenario,
                       "affine-thm31 | piecewise-thm44 | falsifier")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    const ToleranceSet tol = parse_tol_overrides(tol_text);
    const bool have_seed = seed_opt->count() > 0;
    const auto need_seed = [&](const char* what) {
      if (!have_seed)
        throw InvalidArgumentError(std::string("--seed is required for ") + what +
                                   " (sampling must be reproducible)");
    };

    if (construct->parsed()) {
      if (check_cells > 0) need_seed("--check-cells");
      return cmd_construct(spec_path, out_dir, seed, check_cells, tol);
    }
    if (apply_cmd->parsed())
      return cmd_apply(transform_path, samples_path, out_dir, seed, output_name);
    if (verify->parsed()) {
      if (v_transform.empty() == v_pairs.empty())
        throw InvalidArgumentError(
            "verify needs exactly one of --transform or --pairs");
      if (v_pairs.empty()) need_seed("verify");
      return cmd_verify(v_transform, v_pairs, v_claim, out_dir, seed, v_samples,
                        v_alpha, v_grid, v_dump, tol);
    }
    if (identities->parsed())
      return cmd_identities(i_claims, i_pairs, out_dir, seed, tol);
    if (recover->parsed()) return cmd_recover(r_manifest, out_dir, seed, tol);
    if (demo_cmd->parsed()) {
      need_seed("demo");
      return demo::run_scenario(scenario, seed, out_dir);
    }
    return 3;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace gpf
