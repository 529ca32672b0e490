// pickforge: batch front door for the interpolation library.
// Commands: check | solve | verify. JSON in, JSON report out; exit codes
// 0 = pass/solved, 2 = input error, 3 = infeasible, 4 = numerical failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pickforge/json_io.hpp"

namespace {

using namespace pickforge;

struct InfeasibleExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputExit("cannot open file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputExit(std::string("JSON parse error in ") + path + ": " +
                    e.what());
  }
}

std::string problem_kind(const Json& file) {
  if (!file.contains("kind")) throw InputExit("problem file missing \"kind\"");
  std::string kind = file["kind"].get<std::string>();
  if (kind != "nevanlinna-pick" && kind != "aip" &&
      kind != "hs-interpolation" && kind != "boundary")
    throw InputExit("unknown problem kind: " + kind);
  return kind;
}

ToleranceConfig file_tolerances(const Json& file, ToleranceConfig base) {
  if (file.contains("tolerances"))
    return json_to_tolerances(file["tolerances"], base);
  return base;
}

std::uint64_t resolve_seed(const Json& file, bool seed_set,
                           std::uint64_t flag_seed) {
  if (seed_set) return flag_seed;
  if (const char* env = std::getenv("PICKFORGE_SEED"))
    return std::strtoull(env, nullptr, 10);
  if (file.contains("seed")) return file["seed"].get<std::uint64_t>();
  return 0;
}

Json cert_to_json(const PsdCertificate& c) {
  Json j;
  j["is_psd"] = c.is_psd;
  j["min_eigenvalue"] = c.min_eigenvalue;
  j["hermitian_defect"] = c.hermitian_defect;
  return j;
}

Json report_to_json(const VerificationReport& r) {
  Json j;
  j["passed"] = r.passed;
  for (const auto& [k, v] : r.metrics) j[k] = v;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

// Problem payloads decoded once and shared across commands.
struct LoadedProblem {
  std::string kind;
  InterpolationData data;   // np / aip
  HSProblemData hs;         // hs-interpolation and boundary (reduced)
  bool is_hs = false;
};

LoadedProblem load_problem(const Json& file, const ToleranceConfig& cfg) {
  LoadedProblem p;
  p.kind = problem_kind(file);
  if (!file.contains("payload")) throw InputExit("problem file missing \"payload\"");
  const Json& payload = file["payload"];
  try {
    if (p.kind == "nevanlinna-pick" || p.kind == "aip") {
      p.data = json_to_data(payload);
    } else if (p.kind == "hs-interpolation") {
      p.hs = json_to_hs_problem(payload);
      p.is_hs = true;
    } else {
      Realization s = json_to_realization(payload["S"]);
      Complex t0 = json_to_complex(payload["t0"]);
      int order = payload["n"].get<int>();
      std::vector<Complex> targets;
      for (const auto& t : payload["targets"])
        targets.push_back(json_to_complex(t));
      p.hs = to_hs_problem(s, t0, order, targets, nullptr, cfg);
      p.is_hs = true;
    }
  } catch (const Error& e) {
    throw InputExit(e.what());
  }
  return p;
}

void emit(const Json& report, const std::string& output) {
  std::string text = report.dump(2);
  text.push_back('\n');
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw InputExit("cannot write output file: " + output);
    out << text;
  }
}

void write_csv(const std::string& path, const Realization& s,
               const HSProblemData* hs, const InterpolationData* data,
               const ToleranceConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputExit("cannot write csv file: " + path);
  out << "z_re,z_im,min_eig\n";
  char buf[128];
  for (Complex z : interior_grid(cfg.grid_interior_points)) {
    double min_eig;
    if (data) {
      // one-point slice of the augmented interpolation kernel
      const Eigen::Index n = data->state_dim(), q = data->out_dim();
      ComplexMatrix p = build_pick(*data, PickStrategy::Stein, cfg).P;
      ComplexMatrix row =
          (data->E - evaluate(s, z, 0, cfg) * data->N) *
          (ComplexMatrix::Identity(n, n) - z * data->T)
              .fullPivLu()
              .inverse();
      ComplexMatrix big(n + q, n + q);
      big.topLeftCorner(n, n) = p;
      big.bottomLeftCorner(q, n) = row;
      big.topRightCorner(n, q) = row.adjoint();
      big.bottomRightCorner(q, q) = dbr_kernel(s, cfg)(z, z);
      min_eig = psd_certificate(big, cfg).min_eigenvalue;
    } else {
      // membership slice: [[K_S(z,z), f(z)], [f(z)*, 1]]
      ComplexMatrix fz = evaluate(s, z, 0, cfg);
      ComplexMatrix kz = dbr_kernel(hs->S, cfg)(z, z);
      const Eigen::Index q = kz.rows();
      ComplexMatrix big(q + 1, q + 1);
      big.topLeftCorner(q, q) = kz;
      big.topRightCorner(q, 1) = fz;
      big.bottomLeftCorner(1, q) = fz.adjoint();
      big(q, q) = 1.0;
      min_eig = psd_certificate(big, cfg).min_eigenvalue;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", z.real(), z.imag(),
                  min_eig);
    out << buf;
  }
}

int run_check(const Json& file, const ToleranceConfig& cfg,
              const std::string& output) {
  LoadedProblem p = load_problem(file, cfg);
  Json report;
  report["command"] = "check";
  report["kind"] = p.kind;
  PsdCertificate cert;
  if (p.is_hs) {
    cert = hs_solvable(p.hs.P, p.hs.y, cfg);
    report["admissibility"] = report_to_json(check_admissible(p.hs, cfg));
    report["gram"] = matrix_to_json(p.hs.P);
  } else {
    PickResult pr = build_pick(p.data, PickStrategy::Stein, cfg);
    cert = check_solvable(pr.P, cfg);
    report["pick"] = matrix_to_json(pr.P);
    report["stein_residual"] = pr.stein_residual;
  }
  report["solvable"] = cert.is_psd;
  report["certificate"] = cert_to_json(cert);
  emit(report, output);
  return cert.is_psd ? 0 : 3;
}

Realization np_solution(const InterpolationData& data,
                        const ComplexMatrix& p, const std::string& param,
                        std::uint64_t seed, const ToleranceConfig& cfg,
                        Json& report) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(p),
                                                  Eigen::EigenvaluesOnly);
  const bool strict = p.rows() == 0 ||
                      es.eigenvalues().minCoeff() >= 1e-8 * op_norm(p);
  if (strict) {
    report["route"] = "theta-explicit";
    ThetaFunction tf = build_theta_explicit(data, p);
    Realization e =
        param == "random"
            ? random_schur(2, static_cast<int>(data.out_dim()),
                           static_cast<int>(data.in_dim()), seed)
            : Realization::zero(data.out_dim(), data.in_dim());
    if (param != "central" && param != "random")
      e = json_to_realization(load_json(param));
    return lft(tf, e, cfg);
  }
  report["route"] = "redheffer";
  RedhefferColligation coll = build_colligation(data, p, cfg);
  SigmaFunction sf = sigma(coll);
  Realization e = Realization::zero(coll.d_delta_star, coll.d_delta);
  if (param == "random" && coll.d_delta > 0 && coll.d_delta_star > 0)
    e = random_schur(2, static_cast<int>(coll.d_delta_star),
                     static_cast<int>(coll.d_delta), seed);
  else if (param != "central" && param != "random")
    e = json_to_realization(load_json(param));
  return redheffer_apply(sf, e, cfg);
}

int run_solve(const Json& file, const ToleranceConfig& cfg,
              const std::string& param, std::uint64_t seed,
              const std::string& output) {
  LoadedProblem p = load_problem(file, cfg);
  Json report;
  report["command"] = "solve";
  report["kind"] = p.kind;
  report["param_source"] = param;
  if (p.is_hs) {
    PsdCertificate cert = hs_solvable(p.hs.P, p.hs.y, cfg);
    report["certificate"] = cert_to_json(cert);
    if (!cert.is_psd) {
      report["solvable"] = false;
      emit(report, output);
      return 3;
    }
    report["solvable"] = true;
    HSSolution sol = solve_min_norm(p.hs, cfg);
    report["central_norm_sq"] = sol.central_norm_sq;
    report["norm_budget"] = sol.norm_budget;
    report["degenerate"] = sol.degenerate;
    KernelCombination h;
    h.base = sol.param;
    if (param == "random" && sol.norm_budget > cfg.psd_tol) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      h.points.push_back(std::polar(0.3, 2.0 * M_PI * unif(rng)));
      ComplexVector c = ComplexVector::Zero(sol.param.out_dim());
      for (Eigen::Index i = 0; i < c.size(); ++i)
        c(i) = Complex(unif(rng) - 0.5, unif(rng) - 0.5);
      KernelCombination probe = h;
      probe.coeffs.push_back(c);
      double nrm = std::sqrt(kernel_norm_sq(probe, cfg));
      if (nrm > 0.0) c *= 0.5 * sol.norm_budget / nrm;
      h.coeffs.push_back(c);
    } else if (param != "central" && param != "random") {
      h = json_to_kernel_combination(load_json(param));
    }
    Realization f = parametrize_solutions(p.hs, h, cfg);
    report["solution"] = realization_to_json(f);
    emit(report, output);
    return 0;
  }
  PickResult pr = build_pick(p.data, PickStrategy::Stein, cfg);
  PsdCertificate cert = check_solvable(pr.P, cfg);
  report["certificate"] = cert_to_json(cert);
  if (!cert.is_psd) {
    report["solvable"] = false;
    emit(report, output);
    return 3;
  }
  report["solvable"] = true;
  Realization s = np_solution(p.data, pr.P, param, seed, cfg, report);
  VerificationReport vr = verify_interpolant(p.data, s, cfg);
  report["verification"] = report_to_json(vr);
  if (!vr.passed)
    throw Error("solve: produced solution failed verification");
  report["solution"] = realization_to_json(s);
  emit(report, output);
  return 0;
}

int run_verify(const Json& file, const Json& candidate,
               const ToleranceConfig& cfg, const std::string& csv,
               const std::string& output) {
  LoadedProblem p = load_problem(file, cfg);
  Realization cand;
  try {
    cand = json_to_realization(candidate);
  } catch (const Error& e) {
    throw InputExit(e.what());
  }
  Json report;
  report["command"] = "verify";
  report["kind"] = p.kind;
  bool passed = false;
  if (!p.is_hs) {
    VerificationReport vr = verify_interpolant(p.data, cand, cfg);
    report["verification"] = report_to_json(vr);
    passed = vr.passed;
    if (!csv.empty()) write_csv(csv, cand, nullptr, &p.data, cfg);
  } else {
    VerificationReport vr;
    if (p.kind == "boundary") {
      // boundary targets are jets of the candidate at t0
      Complex t0 = json_to_complex(file["payload"]["t0"]);
      const Eigen::Index m = p.hs.y.cols();
      BoundaryJet jet =
          boundary_jet(cand, t0, static_cast<int>(m) - 1, cfg);
      double res = 0.0;
      for (Eigen::Index j = 0; j < m; ++j)
        res = std::max(res, std::abs(jet.derivatives[j](0, 0) -
                                     std::conj(p.hs.y(0, j))));
      vr.metrics["target_residual"] = res;
      passed = res <= 1e-6;
    } else {
      // pairing against the columns of F^S; valid for inner or zero S
      if (!(is_inner(p.hs.S, cfg) || is_zero_function(p.hs.S)))
        throw Error(
            "verify: hs-interpolation verification needs inner or zero S");
      Realization fs = fs_map(p.hs.S, p.hs.data);
      double res = 0.0;
      for (Eigen::Index j = 0; j < p.hs.data.state_dim(); ++j) {
        ComplexMatrix ej =
            ComplexMatrix::Zero(p.hs.data.state_dim(), 1);
        ej(j, 0) = 1.0;
        Realization col = fs * Realization::constant(ej);
        Complex pairing = h2_inner(cand, col, cfg);
        res = std::max(res,
                       std::abs(pairing - std::conj(p.hs.y(0, j))));
      }
      vr.metrics["target_residual"] = res;
      passed = res <= cfg.residual_tol * 100;
    }
    PsdCertificate mem = membership_certificate(
        dbr_kernel(p.hs.S, cfg), cand, 1.0, cfg);
    vr.metrics["membership_min_eig"] = mem.min_eigenvalue;
    passed = passed && mem.is_psd;
    vr.passed = passed;
    report["verification"] = report_to_json(vr);
    if (!csv.empty()) write_csv(csv, cand, &p.hs, nullptr, cfg);
  }
  report["passed"] = passed;
  emit(report, output);
  return passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"norm-constrained interpolation of Schur-class functions"};
  app.require_subcommand(1);

  std::string problem_path, candidate_path, output, csv;
  std::string param = "central";
  double tol = -1.0, truncation = -1.0;
  int grid = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("problem", problem_path, "problem JSON file")->required();
    cmd->add_option("--tol", tol, "residual tolerance override");
    cmd->add_option("--grid", grid, "sample grid size override");
    cmd->add_option("--truncation", truncation, "truncation tolerance");
    cmd->add_option("--output", output, "write the report here");
    cmd->add_option("--seed", seed, "random seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* check = app.add_subcommand("check", "solvability certificate");
  add_common(check);
  CLI::App* solve = app.add_subcommand("solve", "produce a solution");
  add_common(solve);
  solve->add_option("--param", param,
                    "parameter source: central | random | <file>");
  CLI::App* verify = app.add_subcommand("verify", "verify a candidate");
  add_common(verify);
  verify->add_option("candidate", candidate_path, "candidate realization")
      ->required();
  verify->add_option("--csv", csv, "write sampled kernel eigenvalues");

  CLI11_PARSE(app, argc, argv);

  try {
    Json file = load_json(problem_path);
    ToleranceConfig cfg = file_tolerances(file, {});
    if (tol > 0) cfg.residual_tol = tol;
    if (truncation > 0) cfg.truncation_tol = truncation;
    if (grid > 0) {
      cfg.grid_interior_points = grid;
      cfg.grid_boundary_points = grid;
    }
    std::uint64_t eff_seed = resolve_seed(file, seed_set, seed);
    if (check->parsed()) return run_check(file, cfg, output);
    if (solve->parsed())
      return run_solve(file, cfg, param, eff_seed, output);
    Json cand = load_json(candidate_path);
    return run_verify(file, cand, cfg, csv, output);
  } catch (const InputExit& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const UnsolvableError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
}
