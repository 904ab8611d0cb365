#pragma once

#include <string>
#include <vector>

#include "ltp/verifier.hpp"

namespace ltp {

/// Canonical one-line key=value rendering of a solve configuration; the
/// config hash is the FNV-1a-64 digest of this exact line (hex, 16 digits).
std::string config_canonical(const SolveConfig& cfg);
std::string config_hash(const SolveConfig& cfg);

/// Header fields stamped on every report. Everything emitted is a pure
/// function of the inputs: no timestamps, no hostnames, no float formatting.
struct ReportMeta {
  std::string mode;         // subcommand that produced the report
  std::string config;       // canonical config line, empty for ring-free runs
  std::string config_hash;  // digest of `config`, empty when config is
  std::string certificate;  // certificate file reference, empty when none
};

/// JSON-lines report: one header object, one object per verdict record, one
/// closing summary object with pass/fail/inconclusive counts.
std::string jsonl_report(const ReportMeta& meta, const std::vector<VerdictRecord>& recs);

/// CSV of the weight map: k, base-p digits (least significant first),
/// w(k), monna(k). Rationals are rendered num/den.
std::string csv_weight_table(const Params& prm, long kmax);

/// CSV of the measured valuation table: k, w, measured, profile_min,
/// profile_ties, status.
std::string csv_valuation_table(const ValuationTable& t);

/// Self-contained JSON certificate of a solve: configuration and its hash,
/// tower shape, the committed digit walk, the scalar correction, the period
/// approximation payload (coordinates as decimal strings), the per-cell
/// verdict table and the self-checks. Re-derivable: replaying the recorded
/// walk and scalar reproduces the payload bit for bit.
std::string certificate_json(const OmegaResult& res);

/// The replayable core of a parsed certificate plus the recorded payload
/// used for integrity comparison.
struct CertificateData {
  SolveConfig cfg;
  std::vector<DigitCommit> commits;
  std::vector<long> scalar_digits;
  long omega_shift = 0;
  long omega_prec = 0;
  std::vector<Int> omega_coords;
  std::string config_hash;
  bool all_pass = false;
};

/// Parses certificate_json output. Throws std::runtime_error on schema or
/// field violations.
CertificateData parse_certificate(const std::string& text);

/// True when the replayed period approximation matches the recorded payload
/// exactly (shift, precision and every coordinate).
bool payload_matches(const CertificateData& cert, const LocalNum& omega);

}  // namespace ltp
