#include "entorder/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "entorder/parallel.hpp"

namespace entorder::measures {

using linalg::Complex;
using linalg::ComplexMatrix;

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_two_qubits(const DensityMatrix& rho, const char* what) {
  if (!(rho.dims == states::kTwoQubits)) {
    std::ostringstream os;
    os << what << " is defined here for dims (2,2), got (" << rho.dims.a << "," << rho.dims.b
       << ")";
    fail(ErrorKind::DimensionMismatch, os.str());
  }
}

// Entanglement of a (possibly unnormalized) 2x2-bipartite pure vector with
// squared norm p, via the reduced determinant.
double pure_entanglement_2q(const std::array<Complex, 4>& c, double p) {
  const double det = std::norm(c[0] * c[3] - c[1] * c[2]) / (p * p);
  const double root = std::sqrt(std::clamp(1.0 - 4.0 * det, 0.0, 1.0));
  return states::binary_entropy(0.5 * (1.0 + root));
}

// Simple backtracking descent: halve the step on non-improvement, grow it
// modestly on success, stop on gradient norm, value plateau, or budget.
struct DescentOutcome {
  std::vector<double> params;
  double value = 0.0;
  long iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

template <typename FnGrad, typename FnValue>
DescentOutcome descend(std::vector<double> params, FnGrad&& value_and_gradient,
                       FnValue&& value_only, int max_iterations, double initial_step,
                       double gradient_tolerance, double value_tolerance) {
  DescentOutcome out;
  std::vector<double> grad(params.size());
  std::vector<double> trial(params.size());
  double step = initial_step;
  double f = value_and_gradient(params, grad);
  int plateau = 0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    ++out.iterations;
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    out.gradient_norm = gnorm;
    if (gnorm <= gradient_tolerance) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    double ft = f;
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t i = 0; i < params.size(); ++i) trial[i] = params[i] - step * grad[i];
      ft = value_only(trial);
      if (ft < f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no descent direction left at this resolution
      break;
    }

    plateau = (f - ft < value_tolerance) ? plateau + 1 : 0;
    params.swap(trial);
    f = ft;
    step = std::min(step * 1.5, 16.0);
    if (plateau >= 3) {
      out.converged = true;
      break;
    }
    f = value_and_gradient(params, grad);
  }

  out.params = std::move(params);
  out.value = f;
  return out;
}

BlochAngles bloch_from_ket(Complex v0, Complex v1) {
  BlochAngles b;
  b.theta = 2.0 * std::atan2(std::abs(v1), std::abs(v0));
  if (std::abs(v1) < 1e-15 || std::abs(v0) < 1e-15) {
    b.phi = 0.0;
  } else {
    b.phi = std::arg(v1) - std::arg(v0);
    if (b.phi < 0.0) b.phi += 2.0 * std::numbers::pi;
  }
  return b;
}

}  // namespace

std::string_view measure_name(MeasureId id) {
  switch (id) {
    case MeasureId::EntropyOfEntanglement: return "entropy";
    case MeasureId::FormationClosedForm: return "eof";
    case MeasureId::FormationSearch: return "eof_search";
    case MeasureId::RelativeEntropyPPT: return "rel_ent";
  }
  return "?";
}

std::optional<MeasureId> measure_from_name(std::string_view name) {
  if (name == "entropy") return MeasureId::EntropyOfEntanglement;
  if (name == "eof") return MeasureId::FormationClosedForm;
  if (name == "eof_search") return MeasureId::FormationSearch;
  if (name == "rel_ent") return MeasureId::RelativeEntropyPPT;
  return std::nullopt;
}

double measure_tolerance(MeasureId id) {
  switch (id) {
    case MeasureId::EntropyOfEntanglement:
    case MeasureId::FormationClosedForm: return 1e-9;
    case MeasureId::FormationSearch:
    case MeasureId::RelativeEntropyPPT: return 5e-3;
  }
  return 5e-3;
}

DensityMatrix Ensemble::average_state() const {
  const states::Dims dims = members.at(0).dims;
  const std::size_t d = static_cast<std::size_t>(dims.total());
  ComplexMatrix mat(d, d);
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const auto& amp = members[k].amp;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) mat(r, c) += weights[k] * amp[r] * std::conj(amp[c]);
  }
  return DensityMatrix{dims, mat};
}

std::array<Complex, 2> BlochAngles::ket() const {
  return {Complex{std::cos(0.5 * theta), 0.0},
          std::polar(std::sin(0.5 * theta), phi)};
}

DensityMatrix SeparableAnsatz::to_density() const {
  ComplexMatrix mat(4, 4);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const auto a = local_pairs[k][0].ket();
    const auto b = local_pairs[k][1].ket();
    std::array<Complex, 4> prod;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) prod[i * 2 + j] = a[i] * b[j];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) mat(r, c) += weights[k] * prod[r] * std::conj(prod[c]);
  }
  return DensityMatrix{states::kTwoQubits, mat};
}

MeasureValue entropy_of_entanglement(const PureState& psi) {
  const ComplexMatrix proj = psi.projector();
  const ComplexMatrix reduced =
      linalg::partial_trace(proj, psi.dims.a, psi.dims.b, linalg::Subsystem::A);
  MeasureValue mv;
  mv.value = linalg::von_neumann_entropy(reduced);
  mv.status = Status::exact;
  return mv;
}

double concurrence(const DensityMatrix& rho) {
  require_two_qubits(rho, "concurrence");

  // Y (x) Y up to a global sign: antidiagonal (-1, 1, 1, -1)
  ComplexMatrix flip(4, 4);
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;

  const auto eig = linalg::hermitian_eig(rho.mat);
  ComplexMatrix sqrt_rho(4, 4);
  for (int k = 0; k < 4; ++k) {
    const double lam = std::sqrt(std::max(eig.eigenvalues[k], 0.0));
    if (lam == 0.0) continue;
    for (int r = 0; r < 4; ++r) {
      const Complex vr = eig.eigenvectors(r, k) * lam;
      for (int c = 0; c < 4; ++c) sqrt_rho(r, c) += vr * std::conj(eig.eigenvectors(c, k));
    }
  }

  // spectrum of rho (YY) rho* (YY) equals that of the Hermitian
  // sqrt(rho) (YY) rho* (YY) sqrt(rho)
  const ComplexMatrix tilde = flip * linalg::conjugate(rho.mat) * flip;
  const ComplexMatrix m = sqrt_rho * tilde * sqrt_rho;
  const auto nu = linalg::hermitian_eig(m).eigenvalues;
  double c = std::sqrt(std::max(nu[0], 0.0));
  for (int i = 1; i < 4; ++i) c -= std::sqrt(std::max(nu[i], 0.0));
  return std::max(c, 0.0);
}

MeasureValue eof_closed_form(const DensityMatrix& rho) {
  const double c = std::clamp(concurrence(rho), 0.0, 1.0);
  MeasureValue mv;
  mv.value = states::binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
  mv.status = Status::exact;
  return mv;
}

// ---------------------------------------------------------------------------
// Relative entropy of entanglement: descent over separable mixtures
// ---------------------------------------------------------------------------

namespace relent {

namespace {

struct Mixture {
  std::vector<double> weights;                    // softmax of the logits
  std::vector<std::array<Complex, 4>> products;   // component product vectors
  ComplexMatrix sigma{4, 4};
};

Mixture build_mixture(std::span<const double> params, int mixture_size) {
  const int K = mixture_size;
  Mixture mix;
  mix.weights.resize(K);
  mix.products.resize(K);

  double max_logit = params[0];
  for (int k = 1; k < K; ++k) max_logit = std::max(max_logit, params[k]);
  double z = 0.0;
  for (int k = 0; k < K; ++k) {
    mix.weights[k] = std::exp(params[k] - max_logit);
    z += mix.weights[k];
  }
  for (int k = 0; k < K; ++k) mix.weights[k] /= z;

  for (int k = 0; k < K; ++k) {
    const double* ang = params.data() + K + 4 * k;
    const BlochAngles a{ang[0], ang[1]};
    const BlochAngles b{ang[2], ang[3]};
    const auto ka = a.ket();
    const auto kb = b.ket();
    auto& prod = mix.products[k];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) prod[i * 2 + j] = ka[i] * kb[j];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        mix.sigma(r, c) += mix.weights[k] * prod[r] * std::conj(prod[c]);
  }
  return mix;
}

ComplexMatrix with_barrier(const ComplexMatrix& sigma, double tau) {
  ComplexMatrix out = sigma;
  out *= Complex{1.0 - tau, 0.0};
  for (int i = 0; i < 4; ++i) out(i, i) += tau / 4.0;
  return out;
}

double log_divided_difference(double x, double y) {
  if (std::abs(x - y) <= 1e-12 * (x + y)) return 2.0 / ((x + y) * kLn2);
  return (std::log2(x) - std::log2(y)) / (x - y);
}

// tr(rho log2 rho); constant across the descent
double self_entropy_term(const DensityMatrix& rho) {
  const auto eig = linalg::hermitian_eig(rho.mat);
  double s = 0.0;
  for (double lam : eig.eigenvalues)
    if (lam > linalg::kSupportCutoff) s += lam * std::log2(lam);
  return s;
}

std::array<Complex, 4> basis_transform(const ComplexMatrix& u_adj,
                                       const std::array<Complex, 4>& v) {
  std::array<Complex, 4> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i] += u_adj(i, j) * v[j];
  return out;
}

struct EvalContext {
  const ComplexMatrix& rho;
  double self_term;  // tr(rho log2 rho)
  int mixture_size;
};

// Value, and optionally the analytic Daleckii-Krein gradient, sharing one
// eigendecomposition of the barrier-mixed sigma.
double evaluate_mixture(const EvalContext& ctx, std::span<const double> params, double tau,
                        std::vector<double>* grad_out) {
  const int K = ctx.mixture_size;
  const Mixture mix = build_mixture(params, K);
  const ComplexMatrix sigma_tau = with_barrier(mix.sigma, tau);
  const auto eig = linalg::hermitian_eig(sigma_tau);
  const ComplexMatrix u_adj = linalg::adjoint(eig.eigenvectors);

  if (!grad_out) {
    double cross = 0.0;
    std::vector<Complex> col(4);
    for (int k = 0; k < 4; ++k) {
      for (int r = 0; r < 4; ++r) col[r] = eig.eigenvectors(r, k);
      cross += std::log2(eig.eigenvalues[k]) * linalg::expectation(ctx.rho, col).real();
    }
    double value = ctx.self_term - cross;
    if (value < 0.0 && value > -1e-9) value = 0.0;
    return value;
  }

  const ComplexMatrix rho_t = u_adj * ctx.rho * eig.eigenvectors;
  double cross = 0.0;
  for (int k = 0; k < 4; ++k) cross += std::log2(eig.eigenvalues[k]) * rho_t(k, k).real();
  double value = ctx.self_term - cross;
  if (value < 0.0 && value > -1e-9) value = 0.0;

  // A_ij = k(s_i, s_j) rho~_ji (Daleckii-Krein divided differences)
  ComplexMatrix a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      a(i, j) = log_divided_difference(eig.eigenvalues[i], eig.eigenvalues[j]) * rho_t(j, i);

  // shared diagonal term: sum_i A_ii sigma~_ii with the barrier unmixed
  double diag_term = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double s_tilde = (eig.eigenvalues[i] - tau / 4.0) / (1.0 - tau);
    diag_term += a(i, i).real() * s_tilde;
  }

  auto bilinear = [&a](const std::array<Complex, 4>& u, const std::array<Complex, 4>& v) {
    Complex s{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += a(i, j) * u[i] * std::conj(v[j]);
    return s;
  };

  std::vector<double>& grad = *grad_out;
  grad.assign(param_count(K), 0.0);
  const double scale = -(1.0 - tau);

  std::vector<std::array<Complex, 4>> xt(K);
  for (int k = 0; k < K; ++k) xt[k] = basis_transform(u_adj, mix.products[k]);

  for (int m = 0; m < K; ++m)
    grad[m] = scale * mix.weights[m] * (bilinear(xt[m], xt[m]).real() - diag_term);

  for (int k = 0; k < K; ++k) {
    const double* ang = params.data() + K + 4 * k;
    const double ct = std::cos(0.5 * ang[0]), st = std::sin(0.5 * ang[0]);
    const double cu = std::cos(0.5 * ang[2]), su = std::sin(0.5 * ang[2]);
    const Complex ea = std::polar(1.0, ang[1]);
    const Complex eb = std::polar(1.0, ang[3]);

    const std::array<Complex, 2> ka{Complex{ct, 0.0}, st * ea};
    const std::array<Complex, 2> kb{Complex{cu, 0.0}, su * eb};
    const std::array<Complex, 2> da_dtheta{Complex{-0.5 * st, 0.0}, 0.5 * ct * ea};
    const std::array<Complex, 2> da_dphi{Complex{0.0, 0.0}, Complex{0.0, 1.0} * st * ea};
    const std::array<Complex, 2> db_dtheta{Complex{-0.5 * su, 0.0}, 0.5 * cu * eb};
    const std::array<Complex, 2> db_dphi{Complex{0.0, 0.0}, Complex{0.0, 1.0} * su * eb};

    const auto derivative_term = [&](const std::array<Complex, 2>& left,
                                     const std::array<Complex, 2>& right) {
      std::array<Complex, 4> d;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) d[i * 2 + j] = left[i] * right[j];
      const auto dt = basis_transform(u_adj, d);
      return (bilinear(dt, xt[k]) + bilinear(xt[k], dt)).real();
    };

    grad[K + 4 * k + 0] = scale * mix.weights[k] * derivative_term(da_dtheta, kb);
    grad[K + 4 * k + 1] = scale * mix.weights[k] * derivative_term(da_dphi, kb);
    grad[K + 4 * k + 2] = scale * mix.weights[k] * derivative_term(ka, db_dtheta);
    grad[K + 4 * k + 3] = scale * mix.weights[k] * derivative_term(ka, db_dphi);
  }
  return value;
}

}  // namespace

std::size_t param_count(int mixture_size) { return static_cast<std::size_t>(5 * mixture_size); }

std::vector<double> params_from_ansatz(const SeparableAnsatz& ansatz) {
  const int K = static_cast<int>(ansatz.weights.size());
  std::vector<double> p(param_count(K));
  for (int k = 0; k < K; ++k) p[k] = std::log(std::max(ansatz.weights[k], 1e-300));
  for (int k = 0; k < K; ++k) {
    p[K + 4 * k + 0] = ansatz.local_pairs[k][0].theta;
    p[K + 4 * k + 1] = ansatz.local_pairs[k][0].phi;
    p[K + 4 * k + 2] = ansatz.local_pairs[k][1].theta;
    p[K + 4 * k + 3] = ansatz.local_pairs[k][1].phi;
  }
  return p;
}

SeparableAnsatz ansatz_from_params(std::span<const double> params, int mixture_size) {
  const Mixture mix = build_mixture(params, mixture_size);
  SeparableAnsatz ansatz;
  ansatz.weights = mix.weights;
  ansatz.local_pairs.resize(mixture_size);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int k = 0; k < mixture_size; ++k) {
    for (int side = 0; side < 2; ++side) {
      double theta = params[mixture_size + 4 * k + 2 * side];
      double phi = params[mixture_size + 4 * k + 2 * side + 1];
      theta = std::fmod(theta, two_pi);
      if (theta < 0.0) theta += two_pi;
      if (theta > std::numbers::pi) {  // fold; flips a global phase only
        theta = two_pi - theta;
        phi += std::numbers::pi;
      }
      phi = std::fmod(phi, two_pi);
      if (phi < 0.0) phi += two_pi;
      ansatz.local_pairs[k][side] = BlochAngles{theta, phi};
    }
  }
  return ansatz;
}

double objective(const DensityMatrix& rho, std::span<const double> params, int mixture_size,
                 double barrier_tau) {
  const EvalContext ctx{rho.mat, self_entropy_term(rho), mixture_size};
  return evaluate_mixture(ctx, params, barrier_tau, nullptr);
}

std::vector<double> analytic_gradient(const DensityMatrix& rho, std::span<const double> params,
                                      int mixture_size, double barrier_tau) {
  const EvalContext ctx{rho.mat, self_entropy_term(rho), mixture_size};
  std::vector<double> grad;
  evaluate_mixture(ctx, params, barrier_tau, &grad);
  return grad;
}

}  // namespace relent

namespace {

std::vector<double> relent_random_init(int mixture_size, rng::Xoshiro256pp& gen) {
  std::vector<double> p(relent::param_count(mixture_size));
  for (int k = 0; k < mixture_size; ++k) p[k] = 0.3 * gen.normal();
  for (int k = 0; k < mixture_size; ++k) {
    for (int side = 0; side < 2; ++side) {
      p[mixture_size + 4 * k + 2 * side] = std::acos(1.0 - 2.0 * gen.uniform());
      p[mixture_size + 4 * k + 2 * side + 1] = 2.0 * std::numbers::pi * gen.uniform();
    }
  }
  return p;
}

// Classical mixture in the local eigenbases; for pure inputs this is
// already the closest separable state.
std::vector<double> relent_heuristic_init(const DensityMatrix& rho, int mixture_size) {
  const auto eig_a =
      linalg::hermitian_eig(linalg::partial_trace(rho.mat, 2, 2, linalg::Subsystem::A));
  const auto eig_b =
      linalg::hermitian_eig(linalg::partial_trace(rho.mat, 2, 2, linalg::Subsystem::B));

  std::vector<double> p(relent::param_count(mixture_size));
  const int replicas = std::max(mixture_size / 4, 1);
  for (int k = 0; k < mixture_size; ++k) {
    const int combo = k % 4;
    const int i = combo / 2, j = combo % 2;
    const BlochAngles a = bloch_from_ket(eig_a.eigenvectors(0, i), eig_a.eigenvectors(1, i));
    const BlochAngles b = bloch_from_ket(eig_b.eigenvectors(0, j), eig_b.eigenvectors(1, j));
    std::array<Complex, 4> prod;
    const auto ka = a.ket();
    const auto kb = b.ket();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) prod[r * 2 + c] = ka[r] * kb[c];
    const double q = std::max(linalg::expectation(rho.mat, prod).real(), 1e-6);
    p[k] = std::log(q / replicas);
    p[mixture_size + 4 * k + 0] = a.theta;
    p[mixture_size + 4 * k + 1] = a.phi;
    p[mixture_size + 4 * k + 2] = b.theta;
    p[mixture_size + 4 * k + 3] = b.phi;
  }
  return p;
}

struct RestartOutcome {
  std::vector<double> params;
  double value = 0.0;
  long iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

constexpr double kBarrierStart = 1e-2;
constexpr double kBarrierEnd = 1e-10;
constexpr int kBarrierPhases = 9;  // 1e-2 ... 1e-10, factor 10 apart

}  // namespace

RelEntResult relative_entropy_entanglement(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                           int threads) {
  require_two_qubits(rho, "relative entropy of entanglement");
  const int K = cfg.mixture_size;

  const relent::EvalContext ctx{rho.mat, relent::self_entropy_term(rho), K};

  auto run_restart = [&](std::size_t r) {
    std::vector<double> params;
    if (r == 0) {
      params = relent_heuristic_init(rho, K);
    } else {
      auto gen = cfg.seed.stream(r).engine();
      params = relent_random_init(K, gen);
    }

    RestartOutcome out;
    const int per_phase = std::max(cfg.max_iterations / kBarrierPhases, 1);
    for (int phase = 0; phase < kBarrierPhases; ++phase) {
      const double tau = std::max(kBarrierStart * std::pow(0.1, phase), kBarrierEnd);
      auto fg = [&](const std::vector<double>& p, std::vector<double>& g) {
        return relent::evaluate_mixture(ctx, p, tau, &g);
      };
      auto fo = [&](const std::vector<double>& p) {
        return relent::evaluate_mixture(ctx, p, tau, nullptr);
      };
      DescentOutcome d = descend(std::move(params), fg, fo, per_phase, cfg.initial_step,
                                 cfg.gradient_tolerance, cfg.value_tolerance);
      params = std::move(d.params);
      out.iterations += d.iterations;
      out.gradient_norm = d.gradient_norm;
      out.converged = d.converged;
    }
    out.value = relent::evaluate_mixture(ctx, params, kBarrierEnd, nullptr);
    out.params = std::move(params);
    return out;
  };

  const auto outcomes = parallel::map_indexed<RestartOutcome>(
      static_cast<std::size_t>(cfg.restarts), run_restart, threads);

  std::size_t best = 0;
  long total_iterations = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    total_iterations += outcomes[r].iterations;
    if (outcomes[r].value < outcomes[best].value) best = r;
  }

  RelEntResult result;
  result.value.value = outcomes[best].value;
  result.value.status = Status::upper_bound;
  result.value.diagnostics.restarts_used = cfg.restarts;
  result.value.diagnostics.iterations = total_iterations;
  result.value.diagnostics.best_gradient_norm = outcomes[best].gradient_norm;
  result.value.diagnostics.converged = outcomes[best].converged;
  result.argmin = relent::ansatz_from_params(outcomes[best].params, K);
  return result;
}

MeasureValue distillable_upper_bound(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                     int threads) {
  return relative_entropy_entanglement(rho, cfg, threads).value;
}

// ---------------------------------------------------------------------------
// Entanglement of formation by direct decomposition search
// ---------------------------------------------------------------------------

namespace {

constexpr int kEnsembleSize = 4;
constexpr int kEofParams = 16;  // 4x4 Hermitian generator

// U = exp(i G) from the 16 real generator parameters
ComplexMatrix unitary_from_generator(std::span<const double> p) {
  ComplexMatrix g(4, 4);
  for (int i = 0; i < 4; ++i) g(i, i) = p[i];
  int t = 4;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      g(i, j) = Complex{p[t], p[t + 1]};
      g(j, i) = Complex{p[t], -p[t + 1]};
      t += 2;
    }
  const auto eig = linalg::hermitian_eig(g);
  ComplexMatrix u(4, 4);
  for (int k = 0; k < 4; ++k) {
    const Complex phase = std::polar(1.0, eig.eigenvalues[k]);
    for (int r = 0; r < 4; ++r) {
      const Complex vr = eig.eigenvectors(r, k) * phase;
      for (int c = 0; c < 4; ++c) u(r, c) += vr * std::conj(eig.eigenvectors(c, k));
    }
  }
  return u;
}

struct EofTarget {
  std::vector<std::array<Complex, 4>> subnormalized;  // sqrt(lambda_i) v_i
  int rank = 0;
};

EofTarget eof_target(const DensityMatrix& rho) {
  const auto eig = linalg::hermitian_eig(rho.mat);
  EofTarget t;
  for (int i = 0; i < 4; ++i) {
    if (eig.eigenvalues[i] <= linalg::kSupportCutoff) continue;
    std::array<Complex, 4> w;
    const double s = std::sqrt(eig.eigenvalues[i]);
    for (int r = 0; r < 4; ++r) w[r] = s * eig.eigenvectors(r, i);
    t.subnormalized.push_back(w);
    ++t.rank;
  }
  return t;
}

struct EofEnsembleRaw {
  std::array<std::array<Complex, 4>, kEnsembleSize> vectors;  // unnormalized
  std::array<double, kEnsembleSize> weights;                  // their squared norms
};

EofEnsembleRaw eof_ensemble(const EofTarget& target, const ComplexMatrix& u) {
  EofEnsembleRaw e;
  for (int j = 0; j < kEnsembleSize; ++j) {
    e.vectors[j] = {};
    for (int i = 0; i < target.rank; ++i) {
      const Complex coeff = std::conj(u(j, i));
      for (int r = 0; r < 4; ++r) e.vectors[j][r] += coeff * target.subnormalized[i][r];
    }
    double p = 0.0;
    for (const auto& c : e.vectors[j]) p += std::norm(c);
    e.weights[j] = p;
  }
  return e;
}

double eof_objective(const EofTarget& target, std::span<const double> params) {
  const ComplexMatrix u = unitary_from_generator(params);
  const EofEnsembleRaw e = eof_ensemble(target, u);
  double value = 0.0;
  for (int j = 0; j < kEnsembleSize; ++j) {
    if (e.weights[j] < 1e-14) continue;
    value += e.weights[j] * pure_entanglement_2q(e.vectors[j], e.weights[j]);
  }
  return value;
}

}  // namespace

EofSearchResult eof_decomposition_search(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                         int threads) {
  require_two_qubits(rho, "entanglement of formation search");
  const EofTarget target = eof_target(rho);

  auto objective_only = [&target](const std::vector<double>& p) { return eof_objective(target, p); };
  auto fd_gradient = [&](const std::vector<double>& p, std::vector<double>& g) {
    constexpr double h = 1e-5;
    std::vector<double> probe = p;
    for (int i = 0; i < kEofParams; ++i) {
      probe[i] = p[i] + h;
      const double up = eof_objective(target, probe);
      probe[i] = p[i] - h;
      const double down = eof_objective(target, probe);
      probe[i] = p[i];
      g[i] = (up - down) / (2.0 * h);
    }
    return eof_objective(target, p);
  };

  auto run_restart = [&](std::size_t r) {
    std::vector<double> params(kEofParams, 0.0);
    if (r > 0) {
      auto gen = cfg.seed.stream(r).engine();
      for (auto& x : params) x = 0.8 * gen.normal();
    }
    DescentOutcome d = descend(std::move(params), fd_gradient, objective_only,
                               cfg.max_iterations, cfg.initial_step, cfg.gradient_tolerance,
                               cfg.value_tolerance);
    RestartOutcome out;
    out.params = std::move(d.params);
    out.value = d.value;
    out.iterations = d.iterations;
    out.gradient_norm = d.gradient_norm;
    out.converged = d.converged;
    return out;
  };

  const auto outcomes = parallel::map_indexed<RestartOutcome>(
      static_cast<std::size_t>(cfg.restarts), run_restart, threads);

  std::size_t best = 0;
  long total_iterations = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    total_iterations += outcomes[r].iterations;
    if (outcomes[r].value < outcomes[best].value) best = r;
  }

  EofSearchResult result;
  result.value.value = outcomes[best].value;
  result.value.status = Status::upper_bound;
  result.value.diagnostics.restarts_used = cfg.restarts;
  result.value.diagnostics.iterations = total_iterations;
  result.value.diagnostics.best_gradient_norm = outcomes[best].gradient_norm;
  result.value.diagnostics.converged = outcomes[best].converged;

  const ComplexMatrix u = unitary_from_generator(outcomes[best].params);
  const EofEnsembleRaw e = eof_ensemble(target, u);
  for (int j = 0; j < kEnsembleSize; ++j) {
    PureState member{states::kTwoQubits, std::vector<Complex>(4)};
    if (e.weights[j] >= 1e-14) {
      const double inv = 1.0 / std::sqrt(e.weights[j]);
      for (int r = 0; r < 4; ++r) member.amp[r] = e.vectors[j][r] * inv;
    } else {
      member.amp[0] = 1.0;  // zero-weight slot; any unit vector
    }
    result.ensemble.weights.push_back(e.weights[j]);
    result.ensemble.members.push_back(std::move(member));
  }
  return result;
}

MeasureValue evaluate(MeasureId id, const State& state, const OptimizerConfig& cfg, int threads) {
  switch (id) {
    case MeasureId::EntropyOfEntanglement: {
      const auto* psi = std::get_if<PureState>(&state);
      if (!psi)
        fail(ErrorKind::IncompatibleMeasure,
             "entropy of entanglement needs a pure state input");
      return entropy_of_entanglement(*psi);
    }
    case MeasureId::FormationClosedForm: return eof_closed_form(states::to_density(state));
    case MeasureId::FormationSearch:
      return eof_decomposition_search(states::to_density(state), cfg, threads).value;
    case MeasureId::RelativeEntropyPPT:
      return relative_entropy_entanglement(states::to_density(state), cfg, threads).value;
  }
  fail(ErrorKind::IncompatibleMeasure, "unknown measure id");
}

}  // namespace entorder::measures
