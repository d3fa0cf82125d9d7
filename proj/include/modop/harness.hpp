#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "modop/json_io.hpp"
#include "modop/module_space.hpp"
#include "modop/report.hpp"

namespace modop::harness {

// ---- randomness ------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// trial_seed = splitmix64(splitmix64(master ^ splitmix64(suite_index + 1)) + trial_index)
std::uint64_t mix(std::uint64_t master, std::uint64_t suite_index, std::uint64_t trial_index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return gauss_(engine_); }
  Complex cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * kInvSqrt2, im * kInvSqrt2};
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  int uniform_int(int lo, int hi);  // inclusive
  bool chance(double p) { return unit_(engine_) < p; }
  std::uint64_t next() { return engine_(); }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

struct Dims {
  AlgebraShape shape;
  std::size_t rank;
};

/// Up to three algebra blocks of size ≤ max_block, rank ≤ max_rank, embed dimension ≤ max_embed.
Dims gen_dims(Rng& rng, int max_block, int max_rank, std::size_t max_embed = 24);

// ---- instance generators ---------------------------------------------------

struct NormalOptions {
  double kernel_probability = 0.0;   // per eigenvalue, set to exactly zero
  double repeat_probability = 0.0;   // per eigenvalue, copy an earlier one
  double min_modulus = 0.0;          // push |λ| ≥ min_modulus (after kernel zeroing is skipped)
  bool degenerate_moduli = false;    // |λ| ∈ {1, 2} with random phases
};

/// Entries i.i.d. standard complex Gaussian.
OperatorMatrix gen_random_operator(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed);
/// Partial-isometry factor of a random operator (invertible almost surely).
OperatorMatrix gen_random_unitary(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed);
/// W·D·W* with W a random A-linear unitary and D diagonal complex.
OperatorMatrix gen_random_normal(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                 const NormalOptions& opts = {});
OperatorMatrix gen_random_selfadjoint(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                      double kernel_probability = 0.0);
/// G*G, with a kernel when kernel_probability > 0.
OperatorMatrix gen_random_positive(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                   double kernel_probability = 0.0);

enum class CommutantMode {
  TAndTStar,  // commutes with T and T*
  AbsOnly,    // commutes with |T|
};

/// Random polynomial in T, T* (resp. |T|) plus random operators compressed to
/// the spectral subspaces, so kernel-side blocks are populated too.
OperatorMatrix gen_commutant_element(const OperatorMatrix& t, std::uint64_t seed,
                                     CommutantMode mode = CommutantMode::TAndTStar);

enum class KaplanskyBranch { Commuting, Generic };

struct KaplanskyInstance {
  OperatorMatrix t;
  OperatorMatrix s;
};

/// T normal invertible. Generic: S = T⁻¹M with M normal. Commuting: S = p(|T|)·Y
/// with Y a unitary commuting with |T|. Both make TS normal.
KaplanskyInstance gen_kaplansky_instance(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                         KaplanskyBranch branch);
KaplanskyInstance gen_kaplansky_instance(std::uint64_t seed, KaplanskyBranch branch);

struct FixedPointSample {
  OperatorMatrix t;
  std::size_t solution_dim;  // real dimension of {T : T = U T*}
};

/// Random element of the real-linear space {T : T = U·T*}, from the null
/// space of the realified map T ↦ T − U·T*.
FixedPointSample sample_fixed_point(const OperatorMatrix& u, std::uint64_t seed);

/// Spectral projections shared by T and T* (T normal), from the joint
/// clusters of its Hermitian and skew-Hermitian parts.
std::vector<OperatorMatrix> joint_spectral_projections(const OperatorMatrix& t);

// ---- suite runner ----------------------------------------------------------

const std::vector<std::string>& suite_names();

struct SuiteConfig {
  int trials = 200;
  std::uint64_t seed = 1;
  int max_block = 3;
  int max_rank = 4;
  std::optional<double> tol;          // overrides the base tolerance (1e-9); regular suites use 10×
  std::vector<std::string> suites;    // empty = all
  std::string fault_suite;            // inject a perturbed construction into this suite
  unsigned threads = 0;               // 0 = hardware concurrency
};

/// Throws ConfigInvalid.
void validate(const SuiteConfig& cfg);
Json to_json(const SuiteConfig& cfg);

enum class TrialStatus { Pass, Fail, Indeterminate, PreconditionFailed };
const char* to_string(TrialStatus s);

struct Instance {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::string variant;
  bool fault = false;
  double tol = kDefaultTol;
  std::map<std::string, OperatorMatrix> ops;
};

struct TrialOutcome {
  TrialStatus status = TrialStatus::Pass;
  Report report;
  std::string error;
};

Instance generate_instance(const std::string& suite, std::uint64_t seed, std::size_t trial, const SuiteConfig& cfg);
TrialOutcome check_instance(const Instance& inst);

Json instance_to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

struct SuiteResult {
  std::string name;
  int trials = 0;
  int pass = 0;
  int fail = 0;
  int indeterminate = 0;
  int precondition_failed = 0;
  std::map<std::string, double> worst_residuals;
  std::map<std::string, double> worst_ratios;  // value / bound
  std::vector<Json> failures;                  // replayable payloads
  Json extra = Json::object();
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<SuiteResult> suites;
  double wallclock_ms = 0.0;

  bool all_passed() const;
};

SuiteReport run_suite(const SuiteConfig& cfg);
Json to_json(const SuiteResult& r);
Json to_json(const SuiteReport& r);

/// Re-run the verifier named in a failure payload on its stored operators.
TrialOutcome replay(const Json& payload);

}  // namespace modop::harness
