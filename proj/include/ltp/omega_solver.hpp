#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ltp/local_model.hpp"
#include "ltp/lubin_tate.hpp"

namespace ltp {

/// Configuration for the period solve. K is the coefficient-table truncation
/// at the top level; when torsion checks are enabled the tail trust bound
/// requires K + 1 > A * e (readings of the character residual are only
/// meaningful up to (K+1)/e). zeta_power picks the branch: the character is
/// steered so that kappa(t_n) lands on zeta_{p^n}^{zeta_power}. seed_unit
/// picks the residue branch of the leading digit; the final valuation tables
/// are invariant under both choices.
struct SolveConfig {
  long p = 2;
  long f = 2;
  long n = 3;
  long A = 3;
  long K = 160;
  long zeta_power = 1;
  long seed_unit = 0;
  bool with_torsion = true;     // scalar correction + torsion/branch checks
  bool with_consistency = true; // valuation-table agreement with a level-(n-1) solve
  long coord_budget = 500000;

  /// p=2 -> (f2, n3, A3, K160); p=3 -> (f2, n2, A2, K162).
  static SolveConfig defaults_for(long p);
};

/// Three-valued outcome. `fail` is only issued for witnessed violations:
/// a reading strictly below the decision floor contradicting the claim.
/// `inconclusive` means the claim sits at or beyond the floor, where the
/// model provably cannot distinguish the period from its approximation.
enum class Verdict { pass, fail, inconclusive };
std::string verdict_str(Verdict v);

/// One committed digit of the approximation: z += unit[unit_index] * t^position.
struct DigitCommit {
  long position = 0;
  long unit_index = 0;
};

/// Trace of the transverse digit walk plus the deviation audit that turns it
/// into a certificate. depth is the certified lower bound on val(z - c*Omega)
/// over unit scalars c. The walk discriminates digits at position d through
/// the first unsaturated marker P_{q^m} while d/e < m + w(q^m); the audit
/// then examines every candidate deviation depth x = d/e up to the wall
/// n + w(q^n). Under a deviation at depth x, P_k(line) - P_k(z) decomposes
/// into Taylor channels with exactly measured valuations val(D_j P_k(z)) +
/// j*x; when one channel is strictly minimal, val(P_k(z)) is forced by the
/// anchors (marker cells carry w(q^m) exactly, every true coefficient is
/// integral), and a measurement off the forced value refutes x. Grade-tied
/// channels are combined and measured per candidate unit lead; ties whose
/// leads cancel for every unit are genuine first-order flat spots of the
/// landscape. Those depths land in `unrefuted` (normally matching `flags`)
/// and the certified depth stops at the first one.
struct WalkTrace {
  long seed_position = 0;
  long seed_unit = 0;
  std::vector<DigitCommit> commits;
  long positions = 0;       // positions visited after the seed
  long taylor_mults = 0;    // ring multiplications spent on candidate readings
  std::vector<long> flags;  // positions where the marker could not separate candidates
  long audited = 0;             // deviation depths examined by the audit
  std::vector<long> unrefuted;  // positions whose deviation hypothesis survived
  bool depth_clean = true;      // audit refuted every deviation below the wall
  Rational depth{0};            // certified distance bound
};

/// Verdict row for coefficient k. reading = val(P_k(omega_hat)) is an exact
/// measurement at the constructed point; weight_match judges it against w(k)
/// directly. floor_val bounds val(P_k(omega_hat) - P_k(c Omega)) from below
/// via the measured Taylor channels val(D_j P_k(omega_hat)) + j*depth and a
/// Gauss-profile tail; integral and exact_weight attribute the reading to
/// the true coefficient and are decided only when the reading clears that
/// floor.
struct CellReading {
  long k = 0;
  ValueV reading = ValueV::infinite();
  Rational floor_val{0};
  Verdict weight_match = Verdict::inconclusive;  // val(P_k(omega_hat)) = w(k)
  Verdict integral = Verdict::inconclusive;      // val(u_k) >= 0
  Verdict exact_weight = Verdict::inconclusive;  // val(u_k) = w(k)
};

struct SelfCheck {
  std::string id;
  Verdict verdict = Verdict::pass;
  std::string detail;
};

struct OmegaResult {
  SolveConfig cfg;
  long Awork = 0;
  std::shared_ptr<const Tower> tower;
  std::vector<YPoly> family;        // coefficient polynomials P_0..P_max(K, q^n)
  LocalNum omega;                   // scalar-corrected period approximation
  LocalNum zeta;                    // branch target (valid iff with_torsion)
  std::vector<long> scalar_digits;  // Teichmuller indices of c = sum c_i p^i, -1 = zero digit
  WalkTrace walk;
  std::vector<CellReading> cells;   // k = 1..K
  std::vector<SelfCheck> self_checks;
  bool all_pass = false;            // no self-check failed
};

/// Truncated character equation at the canonical torsion point:
///   F(Y) = sum_{k=1}^{K} P0_k(Y) t^k - (zeta - 1)
/// with P0_k the coefficient polynomials matching the tower's torsion
/// coordinate. The logarithm vanishes at torsion points, so in the
/// K -> infinity limit F is locally constant in Y: its value set is discrete
/// (differences of roots of unity) and every Y-derivative tends to 0. deval
/// exposes the truncated derivative, whose valuation is a tail reading, not
/// a slope; no Newton step can descend through it.
class SolverEquation {
 public:
  SolverEquation(std::shared_ptr<const Tower> tw, long K, const std::vector<YPoly>& pk,
                 LocalNum target);
  LocalNum eval(const LocalNum& y) const;
  LocalNum deval(const LocalNum& y) const;
  long K() const { return K_; }
  const LocalNum& target() const { return target_; }
  const std::vector<YPoly>& family() const { return pk_; }

 private:
  std::shared_ptr<const Tower> tw_;
  long K_ = 0;
  std::vector<YPoly> pk_, dpk_;
  LocalNum target_;
  long max_deg_ = 0;
};

/// Period solve at level cfg.n.
///
/// Phase 1 (transverse walk): from the seed unit * t^{e p/(q-1)}, ascend one
/// position at a time, reading the marker family R_m = P_{q^m}(z), m <= n,
/// through exact Taylor expansion around the current point (cached divided
/// derivatives, measured-valuation tail cutoff). A digit is committed when it
/// strictly raises the capped reading of the first unsaturated marker; caps
/// at the true values w(q^m) keep saturated markers immune by construction.
/// This pins the line Omega * O_L^x to depth n + w(q^n).
///
/// Phase 2 (scalar correction, with_torsion): exhaustive c over
/// (O_L / p^n)^x as Teichmuller digit tuples, maximizing the trust-capped
/// valuation of kappa([c] z)(t_n) - zeta^{zeta_power}. Needed because the
/// walk cannot see which point of the line it converged to, and unit twists
/// can land the character on a non-primitive root.
///
/// Phase 3: coefficient table with per-cell verdicts, then self-checks:
/// omega-valuation (exact p/(q-1)), coefficient-integrality,
/// exact-weight-low-range, character-torsion + primitivity + branch
/// targeting (with_torsion), level-consistency (with_consistency).
/// Deterministic throughout; throws on configs whose tail trust cannot
/// support the requested checks.
OmegaResult solve_omega(const SolveConfig& cfg);

/// Re-derive a result from a recorded walk + scalar (no search): rebuilds
/// the tower, replays the commits, and re-measures every table and check
/// from scratch. Used by certificate verification.
OmegaResult replay_omega(const SolveConfig& cfg, const std::vector<DigitCommit>& commits,
                         const std::vector<long>& scalar_digits);

/// u_k table for a coefficient-polynomial family evaluated at omega
/// (index 0..kmax; entry 0 is the constant term of the family).
std::vector<LocalNum> evaluate_family(const std::vector<YPoly>& pk, const LocalNum& omega,
                                      long kmax);

}  // namespace ltp
