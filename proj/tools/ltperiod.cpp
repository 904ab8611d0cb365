#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ltp/report.hpp"

using namespace ltp;

namespace {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void write_file(const std::string& path, const std::string& text) {
  std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream os(fp, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void tally(const std::vector<VerdictRecord>& recs, long long& pass, long long& fail,
           long long& inc) {
  for (const VerdictRecord& r : recs) {
    switch (r.status) {
      case Verdict::pass: ++pass; break;
      case Verdict::fail: ++fail; break;
      case Verdict::inconclusive: ++inc; break;
    }
  }
}

int exit_for(long long fail, long long inc) { return fail > 0 ? 1 : (inc > 0 ? 2 : 0); }

void print_records(const std::vector<VerdictRecord>& recs) {
  for (const VerdictRecord& r : recs)
    std::cout << "[" << verdict_str(r.status) << "] " << r.check_id << " (" << r.instances
              << "): " << r.measured << "\n";
}

void print_self_checks(const OmegaResult& res) {
  for (const SelfCheck& s : res.self_checks)
    std::cout << "[" << verdict_str(s.verdict) << "] " << s.id << ": " << s.detail << "\n";
}

void print_valuation_table(const ValuationTable& t) {
  std::cout << std::left << std::setw(5) << "k" << std::setw(9) << "w" << std::setw(10)
            << "measured" << std::setw(10) << "profile" << std::setw(6) << "ties"
            << "status\n";
  for (const ValuationRow& r : t.rows)
    std::cout << std::left << std::setw(5) << r.k << std::setw(9) << rat_str(r.w) << std::setw(10)
              << r.measured.str() << std::setw(10) << rat_str(r.profile_min) << std::setw(6)
              << r.profile_ties << verdict_str(r.status) << "\n";
}

std::vector<VerdictRecord> self_check_records(const OmegaResult& res) {
  std::vector<VerdictRecord> out;
  for (const SelfCheck& s : res.self_checks) {
    VerdictRecord r;
    r.check_id = s.id;
    r.claim = "solver self-check";
    r.status = s.verdict;
    r.instances = 1;
    r.measured = s.detail;
    r.expected = "pass";
    out.push_back(std::move(r));
  }
  return out;
}

VerdictRecord table_record(const ValuationTable& t) {
  VerdictRecord r;
  r.check_id = "valuation-table";
  r.claim = "val(P_k(omega)) = w(k) for every tabulated k";
  r.instances = static_cast<long long>(t.rows.size());
  r.status = t.fail > 0 ? Verdict::fail
                        : (t.inconclusive > 0 ? Verdict::inconclusive : Verdict::pass);
  std::ostringstream os;
  os << t.pass << " match, " << t.fail << " mismatch, " << t.inconclusive << " inconclusive";
  for (const ValuationRow& row : t.rows)
    if (row.status == Verdict::fail) {
      os << "; first mismatch k=" << row.k << " reads " << row.measured.str() << " vs w="
         << rat_str(row.w);
      break;
    }
  r.measured = os.str();
  r.expected = "every row matches";
  return r;
}

struct SolveFlags {
  long p = 2;
  long n = 0;  // 0 = default for p
  long A = 0;
  long K = 0;
  long zeta_power = -1;  // -1 = default
  long seed_unit = -1;
  bool no_torsion = false;
  bool no_consistency = false;
  long coord_budget = 0;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("-p,--p", f.p, "prime of the base field")->check(CLI::PositiveNumber);
  cmd->add_option("-n,--level", f.n, "torsion level of the model (default per prime)");
  cmd->add_option("-A,--precision", f.A, "certified output precision (default per prime)");
  cmd->add_option("-K,--terms", f.K, "coefficient-table truncation (default per prime)");
  cmd->add_option("--zeta-power", f.zeta_power, "target branch: character lands on zeta^this");
  cmd->add_option("--seed-unit", f.seed_unit, "residue branch of the leading digit");
  cmd->add_flag("--no-torsion", f.no_torsion, "skip scalar correction and character checks");
  cmd->add_flag("--no-consistency", f.no_consistency, "skip the lower-level agreement check");
  cmd->add_option("--coord-budget", f.coord_budget, "coordinate arithmetic budget");
}

SolveConfig to_config(const SolveFlags& f) {
  if (!is_prime(f.p)) throw CLI::ValidationError("--p", "p must be prime");
  SolveConfig cfg = SolveConfig::defaults_for(f.p);
  if (f.n > 0) cfg.n = f.n;
  if (f.A > 0) cfg.A = f.A;
  if (f.K > 0) cfg.K = f.K;
  if (f.zeta_power >= 0) cfg.zeta_power = f.zeta_power;
  if (f.seed_unit >= 0) cfg.seed_unit = f.seed_unit;
  cfg.with_torsion = !f.no_torsion;
  cfg.with_consistency = !f.no_consistency;
  if (f.coord_budget > 0) cfg.coord_budget = f.coord_budget;
  return cfg;
}

struct SuiteFlags {
  long table_kmax = 0;  // 0 = min(K, q^n - 1)
  long cong_kmax = 0;   // 0 = min(32, K)
  long digit_mmax = 0;  // 0 = min(12, largest m the table supports)
  long orbit_nmax = 0;  // 0 = min(4, K/q)
};

void add_suite_flags(CLI::App* cmd, SuiteFlags& f) {
  cmd->add_option("--kmax", f.table_kmax, "valuation-table rows (refused beyond the solved K)");
  cmd->add_option("--cong-kmax", f.cong_kmax, "coefficient-congruence index range");
  cmd->add_option("--digit-mmax", f.digit_mmax, "digit-product congruence m range");
  cmd->add_option("--orbit-nmax", f.orbit_nmax, "orbit-decomposition block range");
}

void resolve_suite_defaults(SuiteFlags& f, const SolveConfig& cfg) {
  long qn = 1;
  for (long i = 0; i < cfg.n; ++i) qn *= cfg.p * cfg.p;
  // default sweeps stay below q^n, where the solve tracks the weight map
  long frontier = std::min(cfg.K, qn - 1);
  if (f.table_kmax == 0) f.table_kmax = frontier;
  if (f.cong_kmax == 0) f.cong_kmax = std::min(32L, frontier);
  if (f.digit_mmax == 0) f.digit_mmax = std::min(12L, (frontier - cfg.p + 1) / cfg.p);
  if (f.orbit_nmax == 0) f.orbit_nmax = std::min(4L, frontier / (cfg.p * cfg.p));
}

/// valuation table + solver self-checks + congruence and orbit suites,
/// shared by `verify` and `all`.
std::vector<VerdictRecord> run_point_suites(const OmegaResult& res, const SuiteFlags& f,
                                            ValuationTable& table_out) {
  std::vector<VerdictRecord> recs = self_check_records(res);
  table_out = valuation_table(res, f.table_kmax);
  recs.push_back(table_record(table_out));
  for (auto& r : check_coefficient_congruences(res, f.cong_kmax)) recs.push_back(std::move(r));
  for (auto& r : check_digit_product(res, f.digit_mmax)) recs.push_back(std::move(r));
  for (auto& r : check_orbit_decomposition(res, f.orbit_nmax)) recs.push_back(std::move(r));
  return recs;
}

int finish_report(const std::string& mode, const SolveConfig* cfg, const std::string& cert_ref,
                  const std::vector<VerdictRecord>& recs, const std::string& report_path) {
  long long pass = 0, fail = 0, inc = 0;
  tally(recs, pass, fail, inc);
  if (!report_path.empty()) {
    ReportMeta meta;
    meta.mode = mode;
    if (cfg != nullptr) {
      meta.config = config_canonical(*cfg);
      meta.config_hash = config_hash(*cfg);
    }
    meta.certificate = cert_ref;
    write_file(report_path, jsonl_report(meta, recs));
    std::cout << "report written to " << report_path << "\n";
  }
  std::cout << "summary: " << pass << " pass, " << fail << " fail, " << inc
            << " inconclusive\n";
  return exit_for(fail, inc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coefficient polynomials of the quadratic Lubin-Tate logarithm, their exact\n"
               "identities, and a certified finite-precision period approximation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain key=value configuration file");
  long jobs = 1;
  app.add_option("-j,--jobs", jobs, "worker threads for exhaustive sweeps");

  // ---- w-table ----
  auto* c_wt = app.add_subcommand("w-table", "weight map w(k) as CSV");
  long wt_p = 2, wt_kmax = 64;
  std::string wt_out;
  c_wt->add_option("-p,--p", wt_p, "prime")->check(CLI::PositiveNumber);
  c_wt->add_option("--kmax", wt_kmax, "last row")->check(CLI::NonNegativeNumber);
  c_wt->add_option("--out", wt_out, "write CSV here instead of stdout");

  // ---- props-w ----
  auto* c_pw = app.add_subcommand("props-w", "structural properties of the weight map");
  long pw_p = 2;
  WPropsLimits pw_lim;
  std::string pw_report;
  c_pw->add_option("-p,--p", pw_p, "prime")->check(CLI::PositiveNumber);
  c_pw->add_option("--kmax", pw_lim.kmax, "exhaustive sweep bound");
  c_pw->add_option("--pairs-gap", pw_lim.pairs_gap, "pair sweep bound for the integer-gap law");
  c_pw->add_option("--pairs-subadd", pw_lim.pairs_subadd, "pair sweep bound for subadditivity");
  c_pw->add_option("--report", pw_report, "write a JSON-lines report here");

  // ---- pk ----
  auto* c_pk = app.add_subcommand("pk", "one coefficient polynomial, both constructions");
  long pk_p = 2, pk_m = 8;
  std::string pk_model = "special";
  c_pk->add_option("-p,--p", pk_p, "prime")->check(CLI::PositiveNumber);
  c_pk->add_option("-m,--m", pk_m, "index")->check(CLI::NonNegativeNumber);
  c_pk->add_option("--model", pk_model, "coordinate: special or polynomial")
      ->check(CLI::IsMember({"special", "polynomial"}));

  // ---- mulp ----
  auto* c_mp = app.add_subcommand("mulp", "shape of the [p]-multiplication series");
  long mp_p = 2;
  long mp_cap = 50;
  c_mp->add_option("-p,--p", mp_p, "prime")->check(CLI::PositiveNumber);
  c_mp->add_option("--cap", mp_cap, "series precision in Z");

  // ---- identities ----
  auto* c_id = app.add_subcommand("identities", "exact identity and congruence sweeps");
  long id_p = 2;
  ExactLimits id_lim;
  std::string id_report;
  c_id->add_option("-p,--p", id_p, "prime")->check(CLI::PositiveNumber);
  c_id->add_option("--pk-mmax", id_lim.pk_mmax, "dual-path comparison bound");
  c_id->add_option("--kmax", id_lim.recurrence_kmax, "divisibility recurrence bound");
  c_id->add_option("--zcap", id_lim.functional_zcap, "functional equation precision, 0 skips");
  c_id->add_option("--mulp-cap", id_lim.mulp_cap, "[p]-series shape precision, 0 skips");
  c_id->add_option("--zeta-mmax", id_lim.zeta_mmax, "last-column vanishing bound");
  c_id->add_option("--binom-mmax", id_lim.binom_mmax, "binomial unit bound");
  c_id->add_option("--wk", id_lim.wprops.kmax, "weight property sweep bound");
  c_id->add_option("--pairs-gap", id_lim.wprops.pairs_gap, "integer-gap pair bound");
  c_id->add_option("--pairs-subadd", id_lim.wprops.pairs_subadd, "subadditivity pair bound");
  c_id->add_option("--report", id_report, "write a JSON-lines report here");

  // ---- solve-omega ----
  auto* c_so = app.add_subcommand("solve-omega", "construct and certify the period approximation");
  SolveFlags so_f;
  std::string so_cert = "certificate.json", so_report, so_csv;
  add_solve_flags(c_so, so_f);
  c_so->add_option("--cert", so_cert, "certificate output path");
  c_so->add_option("--report", so_report, "write a JSON-lines report here");
  c_so->add_option("--csv", so_csv, "write the full valuation table CSV here");

  // ---- verify ----
  auto* c_vf = app.add_subcommand("verify", "replay a certificate and re-verify every claim");
  std::string vf_cert, vf_report, vf_csv;
  SuiteFlags vf_s;
  c_vf->add_option("--cert", vf_cert, "certificate to verify")->required();
  add_suite_flags(c_vf, vf_s);
  c_vf->add_option("--report", vf_report, "write a JSON-lines report here");
  c_vf->add_option("--csv", vf_csv, "write the valuation table CSV here");

  // ---- all ----
  auto* c_all = app.add_subcommand("all", "identities, solve, verify; artifacts in one directory");
  SolveFlags all_f;
  SuiteFlags all_s;
  std::string all_dir = "out";
  c_all->add_option("--outdir", all_dir, "artifact directory (created if missing)");
  add_solve_flags(c_all, all_f);
  add_suite_flags(c_all, all_s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (c_wt->parsed()) {
      if (!is_prime(wt_p)) throw std::invalid_argument("p must be prime");
      std::string csv = csv_weight_table(Params::make(wt_p), wt_kmax);
      if (wt_out.empty())
        std::cout << csv;
      else {
        write_file(wt_out, csv);
        std::cout << "table written to " << wt_out << "\n";
      }
      return 0;
    }

    if (c_pw->parsed()) {
      if (!is_prime(pw_p)) throw std::invalid_argument("p must be prime");
      Params prm = Params::make(pw_p);
      std::vector<VerdictRecord> recs;
      for (const PropertyItem& it : check_w_props(prm, pw_lim, jobs).items) {
        VerdictRecord r;
        r.check_id = it.id;
        r.claim = it.range;
        r.status = it.pass() ? Verdict::pass : Verdict::fail;
        r.instances = it.instances;
        r.measured = it.pass() ? "no violations"
                               : (it.witnesses.empty() ? "violations" : it.witnesses.front());
        r.expected = "no violations";
        recs.push_back(std::move(r));
      }
      print_records(recs);
      return finish_report("props-w", nullptr, "", recs, pw_report);
    }

    if (c_pk->parsed()) {
      if (!is_prime(pk_p)) throw std::invalid_argument("p must be prime");
      Params prm = Params::make(pk_p);
      LTModel model = pk_model == "special" ? LTModel::special : LTModel::polynomial;
      std::vector<YPoly> fam = pk_series(static_cast<unsigned long>(pk_m), prm, model);
      std::cout << "series:        " << fam[static_cast<size_t>(pk_m)].str() << "\n";
      if (model == LTModel::special) {
        YPoly comb = pk_combinatorial(Int(pk_m), prm);
        std::cout << "combinatorial: " << comb.str() << "\n";
        bool same = comb == fam[static_cast<size_t>(pk_m)];
        std::cout << "agree: " << (same ? "yes" : "NO") << "\n";
        return same ? 0 : 1;
      }
      return 0;
    }

    if (c_mp->parsed()) {
      if (!is_prime(mp_p)) throw std::invalid_argument("p must be prime");
      Params prm = Params::make(mp_p);
      Lemma35Result lr = check_mulp_shape(prm, static_cast<size_t>(mp_cap));
      std::cout << "[" << (lr.check.pass ? "pass" : "fail") << "] " << lr.check.id << " ("
                << lr.check.instances << "): "
                << (lr.check.detail.empty() ? "shape holds" : lr.check.detail) << "\n";
      std::cout << "s(Z) head:";
      int shown = 0;
      for (size_t i = 0; i < lr.s.cap() && shown < 6; ++i)
        if (lr.s[i] != 0) {
          std::cout << " " << rat_str(lr.s[i]) << "*Z^" << i;
          ++shown;
        }
      if (shown == 0) std::cout << " 0";
      std::cout << "\n";
      return lr.check.pass ? 0 : 1;
    }

    if (c_id->parsed()) {
      if (!is_prime(id_p)) throw std::invalid_argument("p must be prime");
      Params prm = Params::make(id_p);
      ExactLimits lim = id_lim;
      lim.jobs = jobs;
      std::vector<VerdictRecord> recs = run_exact_suite(prm, lim);
      print_records(recs);
      return finish_report("identities", nullptr, "", recs, id_report);
    }

    if (c_so->parsed()) {
      SolveConfig cfg = to_config(so_f);
      std::cout << "config: " << config_canonical(cfg) << "\n";
      OmegaResult res = solve_omega(cfg);
      std::cout << "walk: " << res.walk.commits.size() << " digits committed, certified depth "
                << rat_str(res.walk.depth) << "\n";
      print_self_checks(res);
      write_file(so_cert, certificate_json(res));
      std::cout << "certificate written to " << so_cert << "\n";
      if (!so_csv.empty()) {
        write_file(so_csv, csv_valuation_table(valuation_table(res, cfg.K)));
        std::cout << "valuation table written to " << so_csv << "\n";
      }
      std::vector<VerdictRecord> recs = self_check_records(res);
      return finish_report("solve-omega", &cfg, so_cert, recs, so_report);
    }

    if (c_vf->parsed()) {
      CertificateData cd = parse_certificate(read_file(vf_cert));
      resolve_suite_defaults(vf_s, cd.cfg);
      if (vf_s.table_kmax > cd.cfg.K)
        throw std::invalid_argument("refusing --kmax " + std::to_string(vf_s.table_kmax) +
                                    ": certificate solved K = " + std::to_string(cd.cfg.K));
      std::cout << "config: " << config_canonical(cd.cfg) << "\n";
      OmegaResult res = replay_omega(cd.cfg, cd.commits, cd.scalar_digits);

      VerdictRecord integ;
      integ.check_id = "certificate-integrity";
      integ.claim = "replaying the recorded walk reproduces the recorded payload and hash";
      integ.instances = 2;
      bool pm = payload_matches(cd, res.omega);
      bool hm = cd.config_hash.empty() || cd.config_hash == config_hash(cd.cfg);
      integ.status = pm && hm ? Verdict::pass : Verdict::fail;
      integ.measured = pm ? (hm ? "payload and hash reproduced" : "config hash mismatch")
                          : "replayed payload differs from recorded coordinates";
      integ.expected = "bitwise equal";

      std::vector<VerdictRecord> recs{integ};
      ValuationTable table;
      for (auto& r : run_point_suites(res, vf_s, table)) recs.push_back(std::move(r));
      print_valuation_table(table);
      print_records(recs);
      if (!vf_csv.empty()) {
        write_file(vf_csv, csv_valuation_table(table));
        std::cout << "valuation table written to " << vf_csv << "\n";
      }
      return finish_report("verify", &cd.cfg, vf_cert, recs, vf_report);
    }

    if (c_all->parsed()) {
      SolveConfig cfg = to_config(all_f);
      resolve_suite_defaults(all_s, cfg);
      if (all_s.table_kmax > cfg.K)
        throw std::invalid_argument("refusing --kmax " + std::to_string(all_s.table_kmax) +
                                    ": configured K = " + std::to_string(cfg.K));
      Params prm = Params::make(cfg.p);
      ExactLimits lim;
      lim.jobs = jobs;
      lim.functional_zcap = std::max(lim.functional_zcap, static_cast<size_t>(prm.q + 1));
      lim.mulp_cap = std::max(lim.mulp_cap, static_cast<size_t>(prm.q + 1));
      std::cout << "config: " << config_canonical(cfg) << "\n";

      std::vector<VerdictRecord> recs = run_exact_suite(prm, lim);
      OmegaResult res = solve_omega(cfg);
      std::cout << "walk: " << res.walk.commits.size() << " digits committed, certified depth "
                << rat_str(res.walk.depth) << "\n";
      ValuationTable table;
      for (auto& r : run_point_suites(res, all_s, table)) recs.push_back(std::move(r));
      print_records(recs);

      const std::string cert_path = all_dir + "/certificate.json";
      write_file(cert_path, certificate_json(res));
      write_file(all_dir + "/weight_table.csv", csv_weight_table(prm, cfg.K));
      write_file(all_dir + "/valuation_table.csv", csv_valuation_table(table));
      std::cout << "artifacts written to " << all_dir << "\n";
      return finish_report("all", &cfg, cert_path, recs, all_dir + "/report.jsonl");
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
