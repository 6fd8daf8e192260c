// spinlab command-line front end: group tables, tensor parameter extraction,
// level diagrams and nuclear spin-flip reports with reproducible outputs.
//
// Exit codes: 0 success, 1 usage error, 2 input validation error,
// 3 internal check failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "spinlab/spinlab.hpp"

namespace fs = std::filesystem;
using namespace spinlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitCheck = 3;

int mc_threads_from_env() {
  if (const char* env = std::getenv("SPINLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

nlohmann::ordered_json readout_config_json(const ReadoutConfig& cfg) {
  nlohmann::ordered_json j;
  j["tau_rad_ns"] = cfg.tau_rad_ns;
  j["tau_wait_ns"] = cfg.tau_wait_ns;
  j["n_cycles"] = cfg.cycles();
  j["T2_star_us"] = cfg.t2_star_us;
  j["T2_star_err_us"] = cfg.t2_star_err_us;
  j["Bz_mT"] = cfg.b_z_mt;
  j["gammaN_kHz_per_mT"] = cfg.gamma_n_khz_per_mt;
  j["Xi_A1_GHz"] = cfg.strain_gaps.xi_a1_ghz;
  j["Xi_A2_GHz"] = cfg.strain_gaps.xi_a2_ghz;
  j["Xi_E12_GHz"] = cfg.strain_gaps.xi_e12_ghz;
  return j;
}

// ---------------------------------------------------------------- grouptab

int run_grouptab(const std::string& outdir, const std::string& basis, bool check_only) {
  // axiom checks: closure, latin-square rows, conjugation consistency,
  // characters, projector completeness
  bool ok = true;
  try {
    const auto table = multiplication_table();
    for (int a = 0; a < 6; ++a) {
      std::array<bool, 7> seen{};
      for (int b = 0; b < 6; ++b) seen[table[a][b]] = true;
      for (int k = 1; k <= 6; ++k) ok = ok && seen[k];
    }
    int chi[] = {2, -1, -1, 0, 0, 0};
    for (int n = 1; n <= 6; ++n) {
      const auto& g = group_elements()[n - 1];
      ok = ok && (g.real_matrix[0][0] + g.real_matrix[1][1]) == Root3(chi[n - 1]);
      const Eigen::Matrix2cd nmat = g.complex();
      ok = ok && (nmat * nmat.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-12;
    }
    RealMat4 sum{};
    for (const auto& g : {projector(Irrep::A1, 1, 1), projector(Irrep::A2, 1, 1),
                          projector(Irrep::E, 1, 1), projector(Irrep::E, 2, 2)})
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sum[i][j] = sum[i][j] + g[i][j];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) ok = ok && sum[i][j] == Root3(i == j ? 1 : 0);
    for (const char* fam : {"quadratic", "mixed", "orbital"}) {
      const auto cat = symmetrized_spin_bases();
      const OperatorExpr* ex = nullptr;
      const OperatorExpr* ey = nullptr;
      for (const auto& b : cat) {
        if (b.irrep == Irrep::E && b.family == fam && b.row == 1) ex = &b.expr;
        if (b.irrep == Irrep::E && b.family == fam && b.row == 2) ey = &b.expr;
      }
      ok = ok && ex && ey && transforms_as_e_pair(*ex, *ey);
    }
  } catch (const std::exception& e) {
    std::cerr << "group check failed: " << e.what() << "\n";
    return kExitCheck;
  }
  if (!ok) {
    std::cerr << "group axiom check failed\n";
    return kExitCheck;
  }
  if (check_only) {
    std::cout << "group axioms hold\n";
    return kExitOk;
  }

  const fs::path dir(outdir);
  fs::create_directories(dir);
  const bool complex_basis = basis == "complex";
  {
    auto out = open_output(dir / "multiplication_table.csv");
    write_multiplication_table_csv(out);
  }
  {
    auto out = open_output(dir / "group_tables.txt");
    out << "multiplication table\n";
    write_multiplication_table_text(out);
    out << "\ncharacter table\n";
    std::ostringstream chi;
    write_character_table_csv(chi);
    out << chi.str() << '\n';
    out << "symmetrized operator bases\n";
    write_basis_catalog_text(out);
    out << "\nrepresentation matrices (" << (complex_basis ? "e+/e-" : "ex/ey") << " basis)\n\n";
    write_representation_matrices(out, complex_basis);
  }
  {
    auto out = open_output(dir / "basis_catalog.csv");
    write_basis_catalog(out);
  }
  RunManifest manifest;
  manifest.command = "grouptab";
  manifest.inputs = {{"basis", basis}};
  manifest.outputs = {(dir / "multiplication_table.csv").string(),
                      (dir / "group_tables.txt").string(), (dir / "basis_catalog.csv").string()};
  manifest.tool_version = kVersion;
  manifest.write((dir / "grouptab.manifest.json").string());
  std::cout << "wrote 3 files to " << dir.string() << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- extract

// One tensor kind, averaged over the supplied occupancies (xx and yy views
// must agree up to ab initio noise; the spread records how well they do).
struct KindSummary {
  int count = 0;
  double axial = 0.0, a_par = 0.0, a_perp = 0.0, g1 = 0.0, g2 = 0.0;
  double spread = 0.0;
  bool signs_known = true;
  std::vector<ExtractedParams> each;

  void add(const ExtractedParams& e, bool known) {
    each.push_back(e);
    ++count;
    axial += (e.gamma_mhz - axial) / count;
    a_par += (e.a_par_mhz - a_par) / count;
    a_perp += (e.a_perp_mhz - a_perp) / count;
    g1 += (e.gamma1_mhz - g1) / count;
    g2 += (e.gamma2_mhz - g2) / count;
    signs_known = signs_known && known;
  }
  void finalize() {
    for (const auto& e : each) {
      spread = std::max(spread, std::abs(e.gamma_mhz - axial));
      spread = std::max(spread, std::abs(e.gamma1_mhz - g1));
      spread = std::max(spread, std::abs(e.gamma2_mhz - g2));
    }
  }
};

int run_extract(const std::vector<std::string>& tensor_files, std::optional<double> p_factor,
                bool no_reduce, std::optional<double> lambda_dft_ghz, const std::string& out_path) {
  if (!no_reduce && !p_factor) {
    std::cerr << "Ham reduction requested but no --p given (use --no-reduce for raw values)\n";
    return kExitInput;
  }
  std::map<TensorKind, KindSummary> kinds;
  nlohmann::ordered_json jin = nlohmann::ordered_json::object();
  for (const auto& file : tensor_files) {
    DefectTensor t = load_tensor(file);
    if (t.frame == TensorFrame::CartesianDiamond) t = rotate_to_local(t);
    ExtractedParams raw;
    bool signs_known = true;
    if (t.occupancy.kind == Occupancy::Kind::Phi) {
      const auto [g1, g2] = extract_invariant(t);
      raw.kind = t.kind;
      raw.gamma_mhz = t.kind == TensorKind::A ? 0.0 : extract_axial_scalar(t);
      raw.gamma1_mhz = g1;
      raw.gamma2_mhz = g2;
      signs_known = false;
    } else {
      raw = extract_axial(t);
    }
    kinds[t.kind].add(raw, signs_known);
    nlohmann::ordered_json jt;
    jt["kind"] = tensor_kind_name(t.kind);
    jt["occupancy"] = t.occupancy.str();
    jt["asymmetry_MHz"] = t.asymmetry_mhz;
    jin[file] = jt;
  }

  auto out = open_output(out_path);
  out.precision(10);
  nlohmann::ordered_json jparams = nlohmann::ordered_json::object();
  nlohmann::ordered_json jraw = nlohmann::ordered_json::object();
  auto emit = [&](const std::string& key, double value) {
    out << key << " = " << value << '\n';
    jparams[key] = value;
  };
  auto note = [&](const std::string& key, double value) {
    out << "# " << key << " = " << value << '\n';
    jraw[key] = value;
  };

  const double q = p_factor ? HamReduction(*p_factor).q() : 1.0;
  if (p_factor) {
    note("ham_p", *p_factor);
    note("ham_q", q);
  }
  if (lambda_dft_ghz) {
    note("lambda_dft_GHz", *lambda_dft_ghz);
    emit("lambda_e_GHz", no_reduce
                             ? *lambda_dft_ghz
                             : ham_reduce_lambda(*lambda_dft_ghz, HamReduction(*p_factor)));
  }
  for (auto& [kind, summary] : kinds) {
    summary.finalize();
    const double scale = no_reduce ? 1.0 : q;
    switch (kind) {
      case TensorKind::D:
        emit("D_e_GHz", summary.axial * 1e-3);
        emit("D1_e_MHz", summary.g1 * scale);
        emit("D2_e_MHz", summary.g2 * scale);
        break;
      case TensorKind::A:
        emit("Apar_e_MHz", summary.a_par);
        emit("Aperp_e_MHz", summary.a_perp);
        emit("A1_e_kHz", summary.g1 * scale * 1e3);
        emit("A2_e_kHz", summary.g2 * scale * 1e3);
        break;
      case TensorKind::P:
        emit("P_e_MHz", summary.axial);
        emit("P1_e_kHz", summary.g1 * scale * 1e3);
        emit("P2_e_kHz", summary.g2 * scale * 1e3);
        break;
    }
    const std::string k = tensor_kind_name(kind);
    note(k + "1_raw_MHz", summary.g1);
    note(k + "2_raw_MHz", summary.g2);
    if (summary.count > 1) note(k + "_occupancy_spread_MHz", summary.spread);
    if (!summary.signs_known)
      out << "# " << k << "1/" << k << "2 signs undetermined (phi occupancy input)\n";
  }

  {
    nlohmann::ordered_json j;
    j["params"] = jparams;
    j["raw"] = jraw;
    auto jout = open_output(out_path + ".json");
    jout << j.dump(2) << '\n';
  }

  RunManifest manifest;
  manifest.command = "extract";
  manifest.inputs = {{"tensors", jin},
                     {"p", p_factor ? nlohmann::ordered_json(*p_factor) : nlohmann::ordered_json()},
                     {"reduce", !no_reduce},
                     {"raw", jraw}};
  manifest.outputs = {out_path, out_path + ".json"};
  manifest.tool_version = kVersion;
  manifest.write(out_path + ".manifest.json");
  return kExitOk;
}

// ------------------------------------------------------------------ levels

int run_levels(const std::string& param_file, const std::string& strain,
               const std::string& field, const std::string& manifold,
               const std::string& out_path, const std::string& dump_path) {
  std::vector<std::string> warnings;
  SpinParams p = load_spin_params(param_file, &warnings);
  for (const auto& w : warnings) std::cerr << "note: " << w << '\n';

  StrainGaps xi;
  if (!strain.empty()) {
    std::istringstream ss(strain);
    char c1, c2;
    if (!(ss >> xi.xi_a1_ghz >> c1 >> xi.xi_a2_ghz >> c2 >> xi.xi_e12_ghz) || c1 != ',' ||
        c2 != ',')
      throw ParamError("bad --strain (want XiA1,XiA2,XiE12 in GHz)");
  }
  if (!field.empty()) {
    std::istringstream ss(field);
    char c1, c2;
    Eigen::Vector3d b;
    if (!(ss >> b.x() >> c1 >> b.y() >> c2 >> b.z()) || c1 != ',' || c2 != ',')
      throw ParamError("bad --field (want Bx,By,Bz in tesla)");
    p.b_field_tesla = b;
  }

  const ProductOperator h = manifold == "ground"
                                ? build_ground_h(p, p.b_field_tesla)
                                : build_excited_h(p, p.b_field_tesla);
  const auto levels = eigenlevels(h, 1e-6);
  auto out = open_output(out_path);
  write_levels_csv(out, levels);
  if (!dump_path.empty()) {
    auto dump = open_output(dump_path);
    for (int i = 0; i < h.matrix.rows(); ++i) {
      for (int j = 0; j < h.matrix.cols(); ++j)
        dump << (j ? " " : "") << format_complex(h.matrix(i, j), 12);
      dump << '\n';
    }
  }

  if (manifold != "ground") {
    const LevelGaps gaps = level_diagram(p, xi);
    std::cout << "gaps from |Ex/Ey> (GHz): E1/E2 " << format_double(gaps.e12_ghz, 6) << ", A1 "
              << format_double(gaps.a1_ghz, 6) << ", A2 " << format_double(gaps.a2_ghz, 6) << "\n";
  }

  RunManifest manifest;
  manifest.command = "levels";
  manifest.inputs = {{"params", spin_params_to_json(p)},
                     {"strain", strain},
                     {"field", field},
                     {"manifold", manifold}};
  manifest.outputs = {out_path};
  manifest.tool_version = kVersion;
  manifest.write(out_path + ".manifest.json");
  return kExitOk;
}

// -------------------------------------------------------------------- flip

int run_flip(const std::string& param_file, const std::string& config_file, bool with_mc,
             std::uint64_t seed, int trajectories, const std::string& out_path) {
  std::vector<std::string> warnings;
  const SpinParams p = load_spin_params(param_file, &warnings);
  const ReadoutConfig cfg = load_readout_config(config_file);

  const FlipReport rep = flip_report(p, cfg);
  std::optional<McReport> mc;
  if (with_mc) {
    McOptions opt;
    opt.threads = mc_threads_from_env();
    mc = monte_carlo_readout(p, cfg, seed, trajectories, opt);
  }

  if (rep.pm1_to_mp1.saturated || rep.pm1_to_0.saturated || rep.zero_to_pm1.saturated)
    std::cerr << "warning: a linear-in-n probability exceeded 1 and was clamped\n";

  {
    auto out = open_output(out_path);
    write_flip_report_csv(out, rep, mc ? &*mc : nullptr);
  }
  write_flip_report_text(std::cout, rep, mc ? &*mc : nullptr);

  RunManifest manifest;
  manifest.command = "flip";
  manifest.inputs = {{"params", spin_params_to_json(p)}, {"config", readout_config_json(cfg)}};
  manifest.outputs = {out_path};
  manifest.tool_version = kVersion;
  if (with_mc) manifest.seed = seed;
  manifest.write(out_path + ".manifest.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinlab: trigonal defect spin Hamiltonians and nuclear spin-flip rates"};
  app.require_subcommand(1);

  // grouptab
  auto* grouptab = app.add_subcommand("grouptab", "emit the group tables");
  std::string gt_out = "grouptab_out";
  std::string gt_basis = "real";
  bool gt_check = false;
  grouptab->add_option("--out", gt_out, "output directory");
  grouptab->add_option("--basis", gt_basis, "matrix basis: real or complex")
      ->check(CLI::IsMember({"real", "complex"}));
  grouptab->add_flag("--check", gt_check, "verify the group axioms and exit");

  // extract
  auto* extract = app.add_subcommand("extract", "extract spin parameters from tensors");
  std::vector<std::string> ex_files;
  double ex_p = -1.0;
  bool ex_noreduce = false;
  double ex_lambda = 0.0;
  std::string ex_out = "params.out";
  extract->add_option("tensors", ex_files, "tensor files")->required()->expected(-1);
  auto* popt = extract->add_option("--p", ex_p, "vibronic reduction factor p in [0,1]");
  extract->add_flag("--no-reduce", ex_noreduce, "emit raw parameters only");
  auto* lopt = extract->add_option("--lambda", ex_lambda, "bare spin-orbit lambda in GHz");
  extract->add_option("-o,--out", ex_out, "output parameter file");

  // levels
  auto* levels = app.add_subcommand("levels", "diagonalize and label the spin levels");
  std::string lv_params, lv_strain, lv_field, lv_manifold = "excited", lv_out = "levels.csv";
  std::string lv_dump;
  levels->add_option("params", lv_params, "spin parameter file")->required();
  levels->add_option("--strain", lv_strain, "strain offsets XiA1,XiA2,XiE12 in GHz");
  levels->add_option("--field", lv_field, "magnetic field Bx,By,Bz in tesla");
  levels->add_option("--manifold", lv_manifold, "excited or ground")
      ->check(CLI::IsMember({"excited", "ground"}));
  levels->add_option("-o,--out", lv_out, "output CSV");
  levels->add_option("--dump-matrix", lv_dump, "also write the Hamiltonian, row-major text");

  // flip
  auto* flip = app.add_subcommand("flip", "nuclear spin-flip report for a readout");
  std::string fl_params, fl_config, fl_out = "flip_report.csv";
  bool fl_mc = false;
  std::uint64_t fl_seed = 1;
  int fl_traj = 10000;
  flip->add_option("params", fl_params, "spin parameter file")->required();
  flip->add_option("config", fl_config, "readout configuration file")->required();
  flip->add_flag("--mc", fl_mc, "validate with the trajectory simulation");
  flip->add_option("--seed", fl_seed, "trajectory seed");
  flip->add_option("--trajectories", fl_traj, "trajectory count");
  flip->add_option("-o,--out", fl_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (grouptab->parsed()) return run_grouptab(gt_out, gt_basis, gt_check);
    if (extract->parsed())
      return run_extract(ex_files, popt->count() ? std::optional<double>(ex_p) : std::nullopt,
                         ex_noreduce,
                         lopt->count() ? std::optional<double>(ex_lambda) : std::nullopt, ex_out);
    if (levels->parsed())
      return run_levels(lv_params, lv_strain, lv_field, lv_manifold, lv_out, lv_dump);
    if (flip->parsed()) return run_flip(fl_params, fl_config, fl_mc, fl_seed, fl_traj, fl_out);
  } catch (const TensorError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParamError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DynamicsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheck;
  }
  return kExitUsage;
}
