#include "ltp/report.hpp"

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ltp {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json verdict_json(const VerdictRecord& r) {
  ordered_json j;
  j["record"] = "verdict";
  j["check_id"] = r.check_id;
  j["status"] = verdict_str(r.status);
  j["instances"] = r.instances;
  j["claim"] = r.claim;
  j["measured"] = r.measured;
  j["expected"] = r.expected;
  return j;
}

ordered_json config_json(const SolveConfig& cfg) {
  ordered_json j;
  j["p"] = cfg.p;
  j["f"] = cfg.f;
  j["n"] = cfg.n;
  j["A"] = cfg.A;
  j["K"] = cfg.K;
  j["zeta_power"] = cfg.zeta_power;
  j["seed_unit"] = cfg.seed_unit;
  j["with_torsion"] = cfg.with_torsion;
  j["with_consistency"] = cfg.with_consistency;
  j["coord_budget"] = cfg.coord_budget;
  return j;
}

}  // namespace

std::string config_canonical(const SolveConfig& cfg) {
  std::ostringstream os;
  os << "p=" << cfg.p << " f=" << cfg.f << " n=" << cfg.n << " A=" << cfg.A << " K=" << cfg.K
     << " zeta_power=" << cfg.zeta_power << " seed_unit=" << cfg.seed_unit
     << " with_torsion=" << (cfg.with_torsion ? 1 : 0)
     << " with_consistency=" << (cfg.with_consistency ? 1 : 0)
     << " coord_budget=" << cfg.coord_budget;
  return os.str();
}

std::string config_hash(const SolveConfig& cfg) { return fnv1a64(config_canonical(cfg)); }

std::string jsonl_report(const ReportMeta& meta, const std::vector<VerdictRecord>& recs) {
  std::ostringstream os;
  ordered_json head;
  head["record"] = "header";
  head["schema"] = "ltp-report/1";
  head["mode"] = meta.mode;
  head["config"] = meta.config;
  head["config_hash"] = meta.config_hash;
  head["certificate"] = meta.certificate;
  os << head.dump() << "\n";

  long long pass = 0, fail = 0, inc = 0;
  for (const VerdictRecord& r : recs) {
    switch (r.status) {
      case Verdict::pass: ++pass; break;
      case Verdict::fail: ++fail; break;
      case Verdict::inconclusive: ++inc; break;
    }
    os << verdict_json(r).dump() << "\n";
  }

  ordered_json tail;
  tail["record"] = "summary";
  tail["checks"] = static_cast<long long>(recs.size());
  tail["pass"] = pass;
  tail["fail"] = fail;
  tail["inconclusive"] = inc;
  tail["config_hash"] = meta.config_hash;
  tail["certificate"] = meta.certificate;
  os << tail.dump() << "\n";
  return os.str();
}

std::string csv_weight_table(const Params& prm, long kmax) {
  std::ostringstream os;
  os << "k,digits_lsb,w,monna\n";
  for (long k = 0; k <= kmax; ++k) {
    Int kk(k);
    os << k << ",";
    std::vector<long> d = digits_p(kk, prm.p);
    for (size_t i = 0; i < d.size(); ++i) os << (i ? " " : "") << d[i];
    os << "," << rat_str(weight(kk, prm)) << "," << rat_str(monna_map(kk, prm.p)) << "\n";
  }
  return os.str();
}

std::string csv_valuation_table(const ValuationTable& t) {
  std::ostringstream os;
  os << "k,w,measured,profile_min,profile_ties,status\n";
  for (const ValuationRow& r : t.rows)
    os << r.k << "," << rat_str(r.w) << "," << r.measured.str() << "," << rat_str(r.profile_min)
       << "," << r.profile_ties << "," << verdict_str(r.status) << "\n";
  return os.str();
}

std::string certificate_json(const OmegaResult& res) {
  ordered_json j;
  j["schema"] = "ltp-certificate/1";
  j["config"] = config_json(res.cfg);
  j["config_hash"] = config_hash(res.cfg);

  ordered_json tw;
  tw["e"] = res.tower->e();
  tw["dim"] = res.tower->dim();
  tw["Awork"] = res.tower->Awork();
  j["tower"] = tw;

  ordered_json walk;
  walk["seed_position"] = res.walk.seed_position;
  walk["seed_unit"] = res.walk.seed_unit;
  ordered_json commits = ordered_json::array();
  for (const DigitCommit& c : res.walk.commits)
    commits.push_back(ordered_json::array({c.position, c.unit_index}));
  walk["commits"] = commits;
  walk["positions"] = res.walk.positions;
  walk["flags"] = res.walk.flags;
  walk["audited"] = res.walk.audited;
  walk["unrefuted"] = res.walk.unrefuted;
  walk["depth_clean"] = res.walk.depth_clean;
  walk["depth"] = rat_str(res.walk.depth);
  j["walk"] = walk;

  j["scalar_digits"] = res.scalar_digits;

  ordered_json om;
  om["shift"] = res.omega.shift();
  om["prec"] = res.omega.prec();
  ordered_json coords = ordered_json::array();
  for (const Int& c : res.omega.coords()) coords.push_back(c.get_str());
  om["coords"] = coords;
  j["omega"] = om;

  ordered_json cells = ordered_json::array();
  for (const CellReading& c : res.cells) {
    ordered_json e;
    e["k"] = c.k;
    e["reading"] = c.reading.str();
    e["floor"] = rat_str(c.floor_val);
    e["weight_match"] = verdict_str(c.weight_match);
    e["integral"] = verdict_str(c.integral);
    e["exact_weight"] = verdict_str(c.exact_weight);
    cells.push_back(e);
  }
  j["cells"] = cells;

  ordered_json checks = ordered_json::array();
  for (const SelfCheck& s : res.self_checks) {
    ordered_json e;
    e["id"] = s.id;
    e["verdict"] = verdict_str(s.verdict);
    e["detail"] = s.detail;
    checks.push_back(e);
  }
  j["self_checks"] = checks;
  j["all_pass"] = res.all_pass;
  return j.dump(2) + "\n";
}

CertificateData parse_certificate(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("certificate: not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "ltp-certificate/1")
      throw std::runtime_error("certificate: unsupported schema '" +
                               j.at("schema").get<std::string>() + "'");
    CertificateData out;
    const auto& c = j.at("config");
    out.cfg.p = c.at("p").get<long>();
    out.cfg.f = c.at("f").get<long>();
    out.cfg.n = c.at("n").get<long>();
    out.cfg.A = c.at("A").get<long>();
    out.cfg.K = c.at("K").get<long>();
    out.cfg.zeta_power = c.at("zeta_power").get<long>();
    out.cfg.seed_unit = c.at("seed_unit").get<long>();
    out.cfg.with_torsion = c.at("with_torsion").get<bool>();
    out.cfg.with_consistency = c.at("with_consistency").get<bool>();
    out.cfg.coord_budget = c.at("coord_budget").get<long>();
    for (const auto& e : j.at("walk").at("commits")) {
      DigitCommit dc;
      dc.position = e.at(0).get<long>();
      dc.unit_index = e.at(1).get<long>();
      out.commits.push_back(dc);
    }
    out.scalar_digits = j.at("scalar_digits").get<std::vector<long>>();
    const auto& om = j.at("omega");
    out.omega_shift = om.at("shift").get<long>();
    out.omega_prec = om.at("prec").get<long>();
    for (const auto& s : om.at("coords")) out.omega_coords.emplace_back(s.get<std::string>());
    out.config_hash = j.value("config_hash", std::string());
    out.all_pass = j.value("all_pass", false);
    return out;
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("certificate: missing or malformed field: ") + e.what());
  }
}

bool payload_matches(const CertificateData& cert, const LocalNum& omega) {
  if (omega.shift() != cert.omega_shift || omega.prec() != cert.omega_prec) return false;
  const std::vector<Int>& c = omega.coords();
  if (c.size() != cert.omega_coords.size()) return false;
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i] != cert.omega_coords[i]) return false;
  return true;
}

}  // namespace ltp
