#include "modop/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "modop/decomposition.hpp"
#include "modop/normality.hpp"
#include "modop/numkernel.hpp"
#include "modop/regular.hpp"

namespace modop::harness {
namespace {

constexpr double kFaultSize = 1e-6;
constexpr double kRoundtripTol = 1e-6;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

OperatorMatrix diagonal_op(const AlgebraShape& shape, std::size_t rank, const std::vector<std::vector<Complex>>& diag) {
  std::vector<CMatrix> blocks;
  for (const auto& d : diag) blocks.push_back(CMatrix::diagonal(d));
  return OperatorMatrix::from_blocks(shape, rank, std::move(blocks));
}

// W·D·W*
OperatorMatrix conjugate(const OperatorMatrix& w, const OperatorMatrix& d) { return w * d * adjoint(w); }

OperatorMatrix normalized(const OperatorMatrix& t, double target = 1.0) {
  const double n = norm(t);
  return n == 0.0 ? t : (target / n) * t;
}

// A-linear single-block projection lifted to a full operator.
OperatorMatrix lift_block(const OperatorMatrix& like, std::size_t b, CMatrix m) {
  std::vector<CMatrix> blocks;
  for (const auto& blk : like.blocks()) blocks.emplace_back(blk.rows(), blk.cols());
  blocks[b] = std::move(m);
  return OperatorMatrix::from_blocks(like.shape(), like.rank(), std::move(blocks));
}

std::vector<OperatorMatrix> block_spectral_projections(const OperatorMatrix& h) {
  std::vector<OperatorMatrix> out;
  for (std::size_t b = 0; b < h.blocks().size(); ++b) {
    const CMatrix& blk = h.block(b);
    for (auto& p : numkernel::spectral_projections(0.5 * (blk + adjoint(blk)))) out.push_back(lift_block(h, b, std::move(p)));
  }
  return out;
}

// Σ_E E·R_E·E with independent random R_E.
OperatorMatrix compressed_noise(const std::vector<OperatorMatrix>& projections, Rng& rng, bool hermitian) {
  const auto& first = projections.front();
  auto acc = OperatorMatrix::zero(first.shape(), first.rank());
  for (const auto& e : projections) {
    auto r = gen_random_operator(e.shape(), e.rank(), rng.next());
    if (hermitian) r = 0.5 * (r + adjoint(r));
    acc += e * r * e;
  }
  return acc;
}

OperatorMatrix exp_i(const OperatorMatrix& h) {
  return map_blocks(h, [](const CMatrix& b) {
    return numkernel::hermitian_calculus(0.5 * (b + adjoint(b)), [](double l) { return std::polar(1.0, l); });
  });
}

OperatorMatrix fault_direction(const Instance& inst) {
  const auto& any = inst.ops.begin()->second;
  return normalized(gen_random_operator(any.shape(), any.rank(), splitmix64(inst.seed ^ 0xFA17FA17FA17FA17ULL)));
}

void perturb_if_faulty(const Instance& inst, OperatorMatrix& target) {
  if (inst.fault) target += kFaultSize * fault_direction(inst);
}

const OperatorMatrix& op(const Instance& inst, const char* key) {
  const auto it = inst.ops.find(key);
  if (it == inst.ops.end()) throw FormatError(std::string("instance lacks operator ") + key);
  return it->second;
}

double min_eigenvalue(const OperatorMatrix& h) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& blk : h.blocks()) {
    const auto e = numkernel::herm_eig(0.5 * (blk + adjoint(blk)));
    if (!e.lambda.empty()) m = std::min(m, e.lambda.front());
  }
  return m;
}

}  // namespace

// ---- randomness ------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t master, std::uint64_t suite_index, std::uint64_t trial_index) {
  return splitmix64(splitmix64(master ^ splitmix64(suite_index + 1)) + trial_index);
}

int Rng::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

Dims gen_dims(Rng& rng, int max_block, int max_rank, std::size_t max_embed) {
  const int nblocks = rng.uniform_int(1, 3);
  std::vector<int> dims;
  for (int i = 0; i < nblocks; ++i) dims.push_back(rng.uniform_int(1, max_block));
  std::size_t rank = static_cast<std::size_t>(rng.uniform_int(1, max_rank));
  auto total = [&] {
    std::size_t s = 0;
    for (int d : dims) s += static_cast<std::size_t>(d);
    return s;
  };
  while (rank * total() > max_embed) {
    if (dims.size() > 1) {
      dims.pop_back();
    } else if (rank > 1) {
      --rank;
    } else {
      dims.back() = static_cast<int>(max_embed);
    }
  }
  return {AlgebraShape(std::move(dims)), rank};
}

// ---- generators ------------------------------------------------------------

OperatorMatrix gen_random_operator(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CMatrix> blocks;
  for (int n : shape.block_dims()) {
    const std::size_t m = rank * static_cast<std::size_t>(n);
    CMatrix blk(m, m);
    for (auto& z : blk.data()) z = rng.cnormal();
    blocks.push_back(std::move(blk));
  }
  return OperatorMatrix::from_blocks(shape, rank, std::move(blocks));
}

OperatorMatrix gen_random_unitary(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed) {
  return polar(gen_random_operator(shape, rank, seed)).v;
}

OperatorMatrix gen_random_normal(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                 const NormalOptions& opts) {
  Rng rng(seed);
  const auto w = gen_random_unitary(shape, rank, rng.next());
  std::vector<std::vector<Complex>> diag;
  for (int n : shape.block_dims()) {
    std::vector<Complex> d(rank * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (opts.degenerate_moduli) {
        d[i] = std::polar(rng.chance(0.5) ? 1.0 : 2.0, rng.uniform(0.0, kTwoPi));
      } else {
        d[i] = rng.cnormal();
      }
      if (opts.min_modulus > 0.0 && std::abs(d[i]) < opts.min_modulus) {
        const double a = std::abs(d[i]);
        d[i] = a == 0.0 ? Complex(opts.min_modulus) : d[i] * ((a + opts.min_modulus) / a);
      }
      if (i > 0 && rng.chance(opts.repeat_probability)) d[i] = d[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))];
      if (opts.min_modulus == 0.0 && rng.chance(opts.kernel_probability)) d[i] = 0.0;
    }
    diag.push_back(std::move(d));
  }
  return conjugate(w, diagonal_op(shape, rank, diag));
}

OperatorMatrix gen_random_selfadjoint(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                      double kernel_probability) {
  Rng rng(seed);
  const auto w = gen_random_unitary(shape, rank, rng.next());
  std::vector<std::vector<Complex>> diag;
  for (int n : shape.block_dims()) {
    std::vector<Complex> d(rank * static_cast<std::size_t>(n));
    for (auto& x : d) x = rng.chance(kernel_probability) ? 0.0 : rng.normal();
    diag.push_back(std::move(d));
  }
  auto h = conjugate(w, diagonal_op(shape, rank, diag));
  return 0.5 * (h + adjoint(h));
}

OperatorMatrix gen_random_positive(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                   double kernel_probability) {
  Rng rng(seed);
  const auto w = gen_random_unitary(shape, rank, rng.next());
  std::vector<std::vector<Complex>> diag;
  for (int n : shape.block_dims()) {
    std::vector<Complex> d(rank * static_cast<std::size_t>(n));
    for (auto& x : d) x = rng.chance(kernel_probability) ? 0.0 : std::abs(rng.normal()) + 0.05;
    diag.push_back(std::move(d));
  }
  auto p = conjugate(w, diagonal_op(shape, rank, diag));
  return 0.5 * (p + adjoint(p));
}

std::vector<OperatorMatrix> joint_spectral_projections(const OperatorMatrix& t) {
  std::vector<OperatorMatrix> out;
  const Complex half_i(0.0, 0.5);
  for (std::size_t b = 0; b < t.blocks().size(); ++b) {
    const CMatrix& blk = t.block(b);
    const CMatrix re = 0.5 * (blk + adjoint(blk));
    const CMatrix im = (Complex(0.0, -1.0) * 0.5) * (blk - adjoint(blk));
    (void)half_i;
    const auto ea = numkernel::spectral_projections(re);
    const auto fb = numkernel::spectral_projections(im);
    for (const auto& e : ea) {
      for (const auto& f : fb) {
        CMatrix p = e * f;
        if (frobenius_norm(p) < 0.5) continue;
        p = 0.5 * (p + adjoint(p));
        out.push_back(lift_block(t, b, std::move(p)));
      }
    }
  }
  return out;
}

OperatorMatrix gen_commutant_element(const OperatorMatrix& t, std::uint64_t seed, CommutantMode mode) {
  Rng rng(seed);
  const auto id = OperatorMatrix::identity(t.shape(), t.rank());
  const Complex c0 = rng.cnormal(), c1 = rng.cnormal(), c2 = rng.cnormal(), c3 = rng.cnormal();
  if (mode == CommutantMode::TAndTStar) {
    const auto tn = (1.0 / (1.0 + norm(t))) * t;
    const auto tns = adjoint(tn);
    auto s = c0 * id + c1 * tn + c2 * tns + c3 * (tn * tns);
    return s + compressed_noise(joint_spectral_projections(t), rng, false);
  }
  const auto abs = abs_op(t);
  const auto an = (1.0 / (1.0 + norm(abs))) * abs;
  auto s = c0 * id + c1 * an + c2 * (an * an);
  return s + compressed_noise(block_spectral_projections(abs), rng, false);
}

KaplanskyInstance gen_kaplansky_instance(const AlgebraShape& shape, std::size_t rank, std::uint64_t seed,
                                         KaplanskyBranch branch) {
  Rng rng(seed);
  const auto w = gen_random_unitary(shape, rank, rng.next());
  const bool degenerate = rng.chance(0.5);
  std::vector<std::vector<Complex>> diag, inv;
  for (int n : shape.block_dims()) {
    std::vector<Complex> d(rank * static_cast<std::size_t>(n));
    for (auto& x : d) {
      if (degenerate) {
        x = std::polar(rng.chance(0.5) ? 1.0 : 2.0, rng.uniform(0.0, kTwoPi));
      } else {
        x = rng.cnormal();
        x *= (std::abs(x) + 0.5) / std::abs(x);
      }
    }
    std::vector<Complex> di(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) di[i] = 1.0 / d[i];
    diag.push_back(std::move(d));
    inv.push_back(std::move(di));
  }
  auto t = conjugate(w, diagonal_op(shape, rank, diag));

  if (branch == KaplanskyBranch::Generic) {
    const auto t_inv = conjugate(w, diagonal_op(shape, rank, inv));
    const auto m = gen_random_normal(shape, rank, rng.next());
    return {std::move(t), t_inv * m};
  }

  const auto abs = abs_op(t);
  const auto id = OperatorMatrix::identity(shape, rank);
  const auto y = exp_i(compressed_noise(block_spectral_projections(abs), rng, true));
  const Complex c0 = rng.cnormal(), c1 = rng.cnormal(), c2 = rng.cnormal();
  const auto an = (1.0 / (1.0 + norm(abs))) * abs;
  auto p = c0 * id + c1 * an + c2 * (an * an);
  return {std::move(t), p * y};
}

KaplanskyInstance gen_kaplansky_instance(std::uint64_t seed, KaplanskyBranch branch) {
  Rng rng(seed);
  auto dims = gen_dims(rng, 3, 4);
  return gen_kaplansky_instance(dims.shape, dims.rank, rng.next(), branch);
}

FixedPointSample sample_fixed_point(const OperatorMatrix& u, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CMatrix> blocks;
  std::size_t total_dim = 0;
  for (const auto& ub : u.blocks()) {
    const std::size_t m = ub.rows();
    const std::size_t n = 2 * m * m;
    // Unknown T, real coordinates x[2(a + c·m) + part]; output T − U·T* in the same layout.
    RMatrix l(n, n);
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t part = 0; part < 2; ++part) {
          const Complex z = part == 0 ? Complex(1.0) : Complex(0.0, 1.0);
          const std::size_t col = 2 * (a + c * m) + part;
          // z·E_ac
          l(2 * (a + c * m), col) += z.real();
          l(2 * (a + c * m) + 1, col) += z.imag();
          // −U·(z·E_ac)* = −conj(z)·U·E_ca : column a receives U's column c.
          for (std::size_t i = 0; i < m; ++i) {
            const Complex v = -std::conj(z) * ub(i, c);
            l(2 * (i + a * m), col) += v.real();
            l(2 * (i + a * m) + 1, col) += v.imag();
          }
        }
      }
    }
    const RMatrix basis = numkernel::null_space(l);
    total_dim += basis.cols();
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < basis.cols(); ++k) {
      const double coef = rng.normal();
      auto bk = basis.col(k);
      for (std::size_t i = 0; i < n; ++i) x[i] += coef * bk[i];
    }
    CMatrix tb(m, m);
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t a = 0; a < m; ++a) tb(a, c) = Complex(x[2 * (a + c * m)], x[2 * (a + c * m) + 1]);
    blocks.push_back(std::move(tb));
  }
  return {OperatorMatrix::from_blocks(u.shape(), u.rank(), std::move(blocks)), total_dim};
}

// ---- suites ----------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "polar_conditions", "commutant_transfer", "v_unitary_range", "unitary_absT", "unitary_star",
      "regular_transform", "theorem_regular", "fuglede_putnam", "kaplansky"};
  return names;
}

void validate(const SuiteConfig& cfg) {
  if (cfg.trials < 1) throw ConfigInvalid("trials must be at least 1");
  if (cfg.max_block < 1) throw ConfigInvalid("max block dimension must be at least 1");
  if (cfg.max_rank < 1) throw ConfigInvalid("max module rank must be at least 1");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ConfigInvalid("tolerance must be positive");
  for (const auto& s : cfg.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigInvalid("unknown suite '" + s + "'");
  if (!cfg.fault_suite.empty() &&
      std::find(suite_names().begin(), suite_names().end(), cfg.fault_suite) == suite_names().end())
    throw ConfigInvalid("unknown fault suite '" + cfg.fault_suite + "'");
}

Json to_json(const SuiteConfig& cfg) {
  Json j = {{"trials", cfg.trials}, {"seed", cfg.seed}, {"max_block", cfg.max_block}, {"max_rank", cfg.max_rank},
            {"suites", cfg.suites}};
  j["tol"] = cfg.tol ? Json(*cfg.tol) : Json(nullptr);
  if (!cfg.fault_suite.empty()) j["fault_suite"] = cfg.fault_suite;
  return j;
}

const char* to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Pass:
      return "pass";
    case TrialStatus::Fail:
      return "fail";
    case TrialStatus::Indeterminate:
      return "indeterminate";
    case TrialStatus::PreconditionFailed:
      return "precondition_failed";
  }
  return "unknown";
}

Instance generate_instance(const std::string& suite, std::uint64_t seed, std::size_t trial, const SuiteConfig& cfg) {
  Instance inst;
  inst.suite = suite;
  inst.seed = seed;
  inst.trial = trial;
  inst.fault = cfg.fault_suite == suite;
  inst.tol = cfg.tol.value_or(kDefaultTol);

  Rng rng(seed);
  auto dims = gen_dims(rng, cfg.max_block, cfg.max_rank);
  // Over a commutative 1×1 block every mutation is invisible, so faulted trials need room.
  if (inst.fault && dims.rank == 1 && dims.shape.total_dim() == dims.shape.block_count()) dims.rank = 2;
  const auto& shape = dims.shape;
  const std::size_t k = dims.rank;
  auto& ops = inst.ops;

  if (suite == "polar_conditions") {
    switch (trial % 3) {
      case 0:
        inst.variant = "generic";
        ops.emplace("T", gen_random_operator(shape, k, rng.next()));
        break;
      case 1: {
        inst.variant = "rank_deficient";
        std::vector<std::vector<Complex>> mask;
        for (int n : shape.block_dims()) {
          std::vector<Complex> d(k * static_cast<std::size_t>(n));
          for (auto& x : d) x = rng.chance(0.4) ? 0.0 : 1.0;
          mask.push_back(std::move(d));
        }
        const auto a = gen_random_operator(shape, k, rng.next());
        const auto b = gen_random_operator(shape, k, rng.next());
        ops.emplace("T", a * diagonal_op(shape, k, mask) * b);
        break;
      }
      default:
        inst.variant = "normal_with_kernel";
        ops.emplace("T", gen_random_normal(shape, k, rng.next(), {.kernel_probability = 0.3, .repeat_probability = 0.2}));
    }
  } else if (suite == "commutant_transfer") {
    const auto t = gen_random_normal(shape, k, rng.next(), {.kernel_probability = 0.3, .repeat_probability = 0.3});
    ops.emplace("S", gen_commutant_element(t, rng.next()));
    ops.emplace("T", t);
  } else if (suite == "v_unitary_range") {
    ops.emplace("T", gen_random_normal(shape, k, rng.next(), {.kernel_probability = 0.3, .repeat_probability = 0.2}));
  } else if (suite == "unitary_absT") {
    const bool degenerate = trial % 2 == 1;
    inst.variant = degenerate ? "degenerate_moduli" : "generic";
    ops.emplace("T", gen_random_normal(shape, k, rng.next(),
                                       {.kernel_probability = 0.3, .repeat_probability = 0.2, .degenerate_moduli = degenerate}));
    const auto p = gen_random_positive(shape, k, rng.next(), 0.3);
    // Unitary in the commutant of P: exp(iH) with H compressed to P's eigenspaces.
    ops.emplace("Uc", exp_i(compressed_noise(block_spectral_projections(p), rng, true)));
    ops.emplace("P", p);
  } else if (suite == "unitary_star") {
    ops.emplace("T", gen_random_normal(shape, k, rng.next(), {.kernel_probability = 0.3, .repeat_probability = 0.2}));
    OperatorMatrix u = OperatorMatrix::identity(shape, k);
    if (trial % 2 == 0) {
      inst.variant = "random_unitary";
      u = gen_random_unitary(shape, k, rng.next());
    } else {
      // Repeated eigenvalues make the fixed-point space non-commutative.
      inst.variant = "degenerate_unitary";
      const auto w = gen_random_unitary(shape, k, rng.next());
      const double phases[] = {0.0, std::numbers::pi, 0.5 * std::numbers::pi, rng.uniform(0.0, kTwoPi)};
      std::vector<std::vector<Complex>> diag;
      for (int n : shape.block_dims()) {
        std::vector<Complex> d(k * static_cast<std::size_t>(n));
        for (auto& x : d) x = std::polar(1.0, phases[rng.uniform_int(0, 3)]);
        diag.push_back(std::move(d));
      }
      u = conjugate(w, diagonal_op(shape, k, diag));
    }
    ops.emplace("Tfp", sample_fixed_point(u, rng.next()).t);
    ops.emplace("Ufp", std::move(u));
  } else if (suite == "regular_transform") {
    const double target = rng.uniform(0.1, 10.0);
    OperatorMatrix t = OperatorMatrix::zero(shape, k);
    switch (trial % 4) {
      case 0:
        inst.variant = "generic";
        t = gen_random_operator(shape, k, rng.next());
        break;
      case 1:
        inst.variant = "normal";
        t = gen_random_normal(shape, k, rng.next(), {.kernel_probability = 0.3});
        break;
      case 2:
        inst.variant = "selfadjoint";
        t = gen_random_selfadjoint(shape, k, rng.next(), 0.3);
        break;
      default:
        inst.variant = "positive";
        t = gen_random_positive(shape, k, rng.next(), 0.3);
    }
    ops.emplace("t", normalized(t, target));
    const auto g = gen_random_operator(shape, k, rng.next());
    ops.emplace("F", normalized(g, 1.0 / rng.uniform(1.05, 2.0)));
  } else if (suite == "theorem_regular") {
    const double target = rng.uniform(0.1, 10.0);
    ops.emplace("t", normalized(gen_random_normal(shape, k, rng.next(), {.kernel_probability = 0.3, .repeat_probability = 0.2}),
                                target));
  } else if (suite == "fuglede_putnam") {
    const auto w1 = gen_random_unitary(shape, k, rng.next());
    const auto w2 = gen_random_unitary(shape, k, rng.next());
    std::vector<std::vector<Complex>> d1, d2;
    for (int n : shape.block_dims()) {
      std::vector<Complex> a(k * static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.cnormal();
        if (i > 0 && rng.chance(0.2)) a[i] = a[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))];
        if (rng.chance(0.15)) a[i] = 0.0;
      }
      std::vector<Complex> b = a;
      for (std::size_t i = b.size(); i > 1; --i) std::swap(b[i - 1], b[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
      for (auto& x : b)
        if (rng.chance(0.3)) x = rng.cnormal();
      // Keep one shared eigenvalue so the intertwiner space is never trivial.
      if (std::none_of(b.begin(), b.end(), [&](Complex x) { return std::find(a.begin(), a.end(), x) != a.end(); }))
        b[0] = a[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(a.size()) - 1))];
      d1.push_back(std::move(a));
      d2.push_back(std::move(b));
    }
    const auto t = conjugate(w1, diagonal_op(shape, k, d1));
    const auto s = conjugate(w2, diagonal_op(shape, k, d2));
    const auto basis = solve_intertwiners(t, s);
    auto a = OperatorMatrix::zero(shape, k);
    for (const auto& b : basis) a += rng.cnormal() * b;
    inst.variant = "intertwiner_dim_" + std::to_string(basis.size());
    ops.emplace("T", t);
    ops.emplace("S", s);
    ops.emplace("A", normalized(a));
  } else if (suite == "kaplansky") {
    const auto branch = trial % 2 == 0 ? KaplanskyBranch::Commuting : KaplanskyBranch::Generic;
    inst.variant = branch == KaplanskyBranch::Commuting ? "commuting" : "generic";
    auto ks = gen_kaplansky_instance(shape, k, rng.next(), branch);
    ops.emplace("T", std::move(ks.t));
    ops.emplace("S", std::move(ks.s));
  } else {
    throw ConfigInvalid("unknown suite '" + suite + "'");
  }
  return inst;
}

TrialOutcome check_instance(const Instance& inst) {
  TrialOutcome out;
  const double tol = inst.tol;
  const double reg_tol = 10.0 * tol;
  auto& rep = out.report;
  rep.name = inst.suite;
  try {
    if (inst.suite == "polar_conditions") {
      const auto& t = op(inst, "T");
      auto parts = polar(t);
      perturb_if_faulty(inst, parts.v);
      rep = polar_residuals(t, parts, tol);
    } else if (inst.suite == "commutant_transfer") {
      const auto& t = op(inst, "T");
      const auto& s = op(inst, "S");
      const auto c1 = commutes(s, t, tol);
      const auto c2 = commutes(s, adjoint(t), tol);
      if (!c1.holds || !c2.holds) throw PreconditionFailed("generated S is not in the commutant of {T, T*}");
      auto parts = polar(t);
      perturb_if_faulty(inst, parts.v);
      rep = commutant_transfer_residuals(t, s, parts, tol);
    } else if (inst.suite == "v_unitary_range") {
      const auto& t = op(inst, "T");
      if (!is_normal(t, tol).holds) throw PreconditionFailed("T is not normal");
      auto v = polar(t).v;
      perturb_if_faulty(inst, v);
      rep = v_unitary_on_range_residuals(t, v, tol);
    } else if (inst.suite == "unitary_absT") {
      const auto& t = op(inst, "T");
      auto u = unitary_abs_construction(t, tol);
      perturb_if_faulty(inst, u);
      rep = witness_abs(t, u, tol).report;
      rep.merge(verify_converse_abs(op(inst, "Uc"), op(inst, "P"), tol), "converse");
    } else if (inst.suite == "unitary_star") {
      const auto& t = op(inst, "T");
      auto u = unitary_star_construction(t, tol);
      perturb_if_faulty(inst, u);
      rep = witness_star(t, u, tol).report;
      rep.merge(verify_converse_star(op(inst, "Tfp"), op(inst, "Ufp"), tol), "converse");
    } else if (inst.suite == "regular_transform") {
      const auto& t = op(inst, "t");
      auto f = bounded_transform(t).transform();
      perturb_if_faulty(inst, f);
      rep = transform_compat_residuals(t, f, tol);
      const double nt = norm(t);
      const double nf = norm(bounded_transform(t).transform());
      rep.value("transform_norm", nf);
      rep.add("strict_contraction", nf < 1.0 ? 0.0 : 1.0, 0.0);
      rep.add("roundtrip", norm(inverse_transform(bounded_transform(t)) - t), kRoundtripTol * std::pow(1.0 + nt, 3));
      const RegularOp contraction(op(inst, "F"));
      const auto back = inverse_transform(contraction);
      const double nb = norm(back);
      rep.add("reverse_roundtrip", norm(bounded_transform(back).transform() - contraction.transform()),
              kRoundtripTol * std::pow(1.0 + nb, 3));
    } else if (inst.suite == "theorem_regular") {
      const auto& t = op(inst, "t");
      if (!is_normal(t, reg_tol).holds) throw PreconditionFailed("t is not normal");
      auto u = unitary_star_construction(bounded_transform(t).transform(), reg_tol);
      perturb_if_faulty(inst, u);
      rep = regular_witness(t, u, reg_tol).report;
      const double nt = norm(t);
      rep.add("roundtrip", norm(inverse_transform(bounded_transform(t)) - t), kRoundtripTol * std::pow(1.0 + nt, 3));
      const double qmin = min_eigenvalue(transform_q(t));
      rep.value("q_min_eigenvalue", qmin);
      rep.add("q_invertible", qmin > 0.0 ? 0.0 : 1.0, 0.0);
    } else if (inst.suite == "fuglede_putnam") {
      auto s = op(inst, "S");
      perturb_if_faulty(inst, s);
      rep = fuglede_putnam_check(op(inst, "T"), s, op(inst, "A"), tol);
    } else if (inst.suite == "kaplansky") {
      auto s = op(inst, "S");
      perturb_if_faulty(inst, s);
      const auto k = kaplansky_check(op(inst, "T"), s, tol);
      rep = k.report;
      rep.flag("agree", k.status == KaplanskyStatus::Agree);
      if (k.status == KaplanskyStatus::Indeterminate) {
        out.status = TrialStatus::Indeterminate;
        return out;
      }
      if (k.status == KaplanskyStatus::Disagree) rep.add("verdict_equality", 1.0, 0.0);
    } else {
      throw FormatError("unknown suite '" + inst.suite + "'");
    }
    rep.name = inst.suite;
    out.status = rep.passed() ? TrialStatus::Pass : TrialStatus::Fail;
  } catch (const PreconditionFailed& e) {
    out.status = TrialStatus::PreconditionFailed;
    out.error = e.what();
  } catch (const std::exception& e) {
    out.status = TrialStatus::Fail;
    out.error = e.what();
  }
  return out;
}

Json instance_to_json(const Instance& inst) {
  Json ops = Json::object();
  for (const auto& [name, t] : inst.ops) ops[name] = to_json(t);
  return {{"suite", inst.suite}, {"seed", inst.seed}, {"trial", inst.trial}, {"variant", inst.variant},
          {"fault", inst.fault}, {"tol", inst.tol}, {"ops", std::move(ops)}};
}

Instance instance_from_json(const Json& j) {
  try {
    Instance inst;
    inst.suite = j.at("suite").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.trial = j.at("trial").get<std::size_t>();
    inst.variant = j.value("variant", "");
    inst.fault = j.value("fault", false);
    inst.tol = j.value("tol", kDefaultTol);
    for (const auto& [name, t] : j.at("ops").items()) inst.ops.emplace(name, operator_from_json(t));
    if (inst.ops.empty()) throw FormatError("instance has no operators");
    return inst;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed instance payload: ") + e.what());
  }
}

TrialOutcome replay(const Json& payload) { return check_instance(instance_from_json(payload)); }

// ---- runner ----------------------------------------------------------------

namespace {

Json outcome_to_json(const TrialOutcome& o) {
  Json j = {{"status", to_string(o.status)}, {"report", to_json(o.report)}};
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

void absorb(SuiteResult& res, const Instance& inst, const TrialOutcome& o) {
  switch (o.status) {
    case TrialStatus::Pass:
      ++res.pass;
      break;
    case TrialStatus::Fail:
      ++res.fail;
      break;
    case TrialStatus::Indeterminate:
      ++res.indeterminate;
      break;
    case TrialStatus::PreconditionFailed:
      ++res.precondition_failed;
      ++res.fail;
      break;
  }
  for (const auto& r : o.report.residuals) {
    auto& w = res.worst_residuals[r.name];
    w = std::max(w, r.value);
    if (r.bound > 0.0) {
      auto& q = res.worst_ratios[r.name];
      q = std::max(q, r.value / r.bound);
    }
  }
  if (o.status == TrialStatus::Fail || o.status == TrialStatus::PreconditionFailed) {
    Json payload = instance_to_json(inst);
    payload["outcome"] = outcome_to_json(o);
    res.failures.push_back(std::move(payload));
  }
}

struct TrialRecord {
  Instance inst;
  TrialOutcome outcome;
};

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
}

bool is_kaplansky_witness(const TrialOutcome& o) {
  if (o.status != TrialStatus::Pass) return false;
  return !o.report.flag_value("st_normal") && !o.report.flag_value("s_commutes_abs");
}

}  // namespace

bool SuiteReport::all_passed() const {
  for (const auto& s : suites)
    if (s.fail > 0) return false;
  return true;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;

  SuiteReport report;
  report.config = cfg;
  const auto& names = suite_names();
  for (std::size_t si = 0; si < names.size(); ++si) {
    const auto& name = names[si];
    if (!cfg.suites.empty() && std::find(cfg.suites.begin(), cfg.suites.end(), name) == cfg.suites.end()) continue;

    std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.trials));
    parallel_for(records.size(), threads, [&](std::size_t i) {
      auto& rec = records[i];
      const auto seed = mix(cfg.seed, si, i);
      try {
        rec.inst = generate_instance(name, seed, i, cfg);
        rec.outcome = check_instance(rec.inst);
      } catch (const std::exception& e) {
        rec.inst.suite = name;
        rec.inst.seed = seed;
        rec.inst.trial = i;
        rec.outcome.status = TrialStatus::Fail;
        rec.outcome.error = std::string("generator: ") + e.what();
      }
    });

    SuiteResult res;
    res.name = name;
    res.trials = cfg.trials;
    for (const auto& rec : records) absorb(res, rec.inst, rec.outcome);

    if (name == "kaplansky") {
      // The asymmetry witness (TS normal, ST not) must show up in every run.
      int witnesses = 0;
      for (const auto& rec : records) witnesses += is_kaplansky_witness(rec.outcome) ? 1 : 0;
      Json w = {{"witnesses", witnesses}, {"retries", 0}};
      if (witnesses == 0) {
        SuiteConfig generic = cfg;
        generic.fault_suite.clear();
        bool found = false;
        for (int attempt = 0; attempt < 50 && !found; ++attempt) {
          const auto trial = static_cast<std::size_t>(2 * (cfg.trials / 2 + attempt) + 1);  // odd index: generic branch
          const auto inst = generate_instance(name, mix(cfg.seed, si, trial), trial, generic);
          found = is_kaplansky_witness(check_instance(inst));
          w["retries"] = attempt + 1;
        }
        w["witnesses"] = found ? 1 : 0;
        if (!found) {
          w["generator_starvation"] = true;
          ++res.fail;
        }
      }
      res.extra["false_false_witness"] = std::move(w);
    }
    report.suites.push_back(std::move(res));
  }
  report.wallclock_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json to_json(const SuiteResult& r) {
  Json j = {{"name", r.name},
            {"trials", r.trials},
            {"pass", r.pass},
            {"fail", r.fail},
            {"indeterminate", r.indeterminate},
            {"precondition_failed", r.precondition_failed},
            {"worst_residuals", r.worst_residuals},
            {"worst_ratios", r.worst_ratios},
            {"failures", r.failures}};
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

Json to_json(const SuiteReport& r) {
  Json suites = Json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  return {{"config", to_json(r.config)}, {"suites", std::move(suites)}, {"wallclock_ms", r.wallclock_ms}};
}

}  // namespace modop::harness
