#include "entorder/states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entorder/text.hpp"

namespace entorder::states {

namespace {

constexpr double kTraceTol = 1e-10;

[[noreturn]] void domain_error(const std::string& msg) { fail(ErrorKind::DomainError, msg); }

// seed=/stream= keys shared by the stochastic family specs
struct SpecSeed {
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
};

bool take_key(std::string_view item, std::string_view key, std::string_view& value) {
  if (item.size() <= key.size() + 1 || item.substr(0, key.size()) != key ||
      item[key.size()] != '=')
    return false;
  value = item.substr(key.size() + 1);
  return true;
}

}  // namespace

ComplexMatrix PureState::projector() const {
  return linalg::outer(amp, amp);
}

double PureState::norm() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return std::sqrt(s);
}

DensityMatrix to_density(const State& s) {
  if (const auto* rho = std::get_if<DensityMatrix>(&s)) return *rho;
  return std::get<PureState>(s).to_density();
}

Dims state_dims(const State& s) {
  return std::visit([](const auto& v) { return v.dims; }, s);
}

DensityMatrix validate(const ComplexMatrix& mat, Dims dims, ValidationStats* stats) {
  const std::size_t d = static_cast<std::size_t>(dims.total());
  if (!mat.square() || mat.rows() != d) {
    std::ostringstream os;
    os << "matrix is " << mat.rows() << "x" << mat.cols() << ", dims (" << dims.a << "," << dims.b
       << ") need " << d << "x" << d;
    fail(ErrorKind::DimensionMismatch, os.str());
  }

  const double herm = linalg::hermiticity_defect(mat);
  if (stats) stats->hermiticity_defect = herm;
  if (herm > linalg::kHermitianTol) {
    std::ostringstream os;
    os << "hermiticity defect " << herm << " exceeds " << linalg::kHermitianTol;
    fail(ErrorKind::NotHermitian, os.str());
  }

  const double tr_defect = std::abs(linalg::trace(mat) - Complex{1.0, 0.0});
  if (stats) stats->trace_defect = tr_defect;
  if (tr_defect > kTraceTol) {
    std::ostringstream os;
    os << "trace deviates from 1 by " << tr_defect;
    fail(ErrorKind::NotUnitTrace, os.str());
  }

  const linalg::EigenDecomposition eig = linalg::hermitian_eig(mat);
  const double min_eig = eig.eigenvalues.back();
  if (stats) stats->min_eigenvalue = min_eig;
  if (min_eig < linalg::kEigClipFloor) {
    std::ostringstream os;
    os << "minimum eigenvalue " << min_eig << " below " << linalg::kEigClipFloor;
    fail(ErrorKind::NotPositive, os.str());
  }

  if (min_eig >= 0.0) return DensityMatrix{dims, mat};

  // Clip round-off negatives and renormalize on the clipped spectrum.
  if (stats) stats->clipped = true;
  std::vector<double> lam = eig.eigenvalues;
  double total = 0.0;
  for (double& l : lam) {
    l = std::max(l, 0.0);
    total += l;
  }
  ComplexMatrix out(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const double w = lam[k] / total;
    if (w == 0.0) continue;
    for (std::size_t r = 0; r < d; ++r) {
      const Complex vr = eig.eigenvectors(r, k) * w;
      for (std::size_t c = 0; c < d; ++c) out(r, c) += vr * std::conj(eig.eigenvectors(c, k));
    }
  }
  return DensityMatrix{dims, out};
}

const std::array<std::array<Complex, 4>, 4>& bell_basis() {
  static const double r = 1.0 / std::sqrt(2.0);
  static const std::array<std::array<Complex, 4>, 4> basis = {{
      {Complex{r}, {}, {}, Complex{r}},    // Phi+
      {Complex{r}, {}, {}, Complex{-r}},   // Phi-
      {{}, Complex{r}, Complex{r}, {}},    // Psi+
      {{}, Complex{r}, Complex{-r}, {}},   // Psi-
  }};
  return basis;
}

PureState bell_phi_plus() {
  const auto& b = bell_basis()[0];
  return PureState{kTwoQubits, {b.begin(), b.end()}};
}

DensityMatrix werner(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
    std::ostringstream os;
    os << "werner fidelity " << fidelity << " outside [0, 1]";
    domain_error(os.str());
  }
  const double g = (1.0 - fidelity) / 3.0;
  return bell_diagonal({fidelity, g, g, g});
}

DensityMatrix bell_diagonal(const std::array<double, 4>& weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      std::ostringstream os;
      os << "negative Bell weight " << w;
      domain_error(os.str());
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "Bell weights sum to " << sum;
    domain_error(os.str());
  }
  ComplexMatrix mat(4, 4);
  const auto& basis = bell_basis();
  for (int k = 0; k < 4; ++k) {
    if (weights[k] == 0.0) continue;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) mat(r, c) += weights[k] * basis[k][r] * std::conj(basis[k][c]);
  }
  return DensityMatrix{kTwoQubits, mat};
}

PureState haar_pure(Dims dims, const SeedSpec& seed) {
  auto gen = seed.engine();
  PureState psi{dims, std::vector<Complex>(dims.total())};
  for (auto& a : psi.amp) a = gen.complex_normal();
  double n = psi.norm();
  for (auto& a : psi.amp) a /= n;
  return psi;
}

DensityMatrix ginibre_mixed(Dims dims, int k, const SeedSpec& seed) {
  const int d = dims.total();
  if (k < 1 || k > d) {
    std::ostringstream os;
    os << "ginibre rank parameter " << k << " outside [1, " << d << "]";
    domain_error(os.str());
  }
  auto gen = seed.engine();
  ComplexMatrix g(d, k);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < k; ++c) g(r, c) = gen.complex_normal();
  ComplexMatrix w = g * linalg::adjoint(g);
  const double tr = linalg::trace(w).real();
  w *= Complex{1.0 / tr, 0.0};
  return DensityMatrix{dims, w};
}

DensityMatrix random_separable(int num_components, const SeedSpec& seed) {
  if (num_components < 1) domain_error("separable mixture needs at least one component");
  auto gen = seed.engine();

  std::vector<double> weights(num_components);
  double total = 0.0;
  for (double& w : weights) {
    w = -std::log(1.0 - gen.uniform());  // Dirichlet(1,...,1) via exponentials
    total += w;
  }
  for (double& w : weights) w /= total;

  ComplexMatrix mat(4, 4);
  for (int k = 0; k < num_components; ++k) {
    std::array<Complex, 2> a{gen.complex_normal(), gen.complex_normal()};
    std::array<Complex, 2> b{gen.complex_normal(), gen.complex_normal()};
    const double na = std::sqrt(std::norm(a[0]) + std::norm(a[1]));
    const double nb = std::sqrt(std::norm(b[0]) + std::norm(b[1]));
    std::array<Complex, 4> prod;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) prod[i * 2 + j] = (a[i] / na) * (b[j] / nb);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) mat(r, c) += weights[k] * prod[r] * std::conj(prod[c]);
  }
  return DensityMatrix{kTwoQubits, mat};
}

PureState pure_with_schmidt(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "Schmidt weight " << p << " outside [0, 1]";
    domain_error(os.str());
  }
  PureState psi{kTwoQubits, std::vector<Complex>(4)};
  psi.amp[0] = std::sqrt(p);
  psi.amp[3] = std::sqrt(1.0 - p);
  return psi;
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "binary entropy argument " << p << " outside [0, 1]";
    domain_error(os.str());
  }
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double invert_binary_entropy(double entropy) {
  if (!(entropy >= 0.0 && entropy <= 1.0)) {
    std::ostringstream os;
    os << "entropy target " << entropy << " outside [0, 1]";
    domain_error(os.str());
  }
  if (entropy <= 0.0) return 0.0;
  if (entropy >= 1.0) return 0.5;
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < entropy)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-17 && std::abs(binary_entropy(0.5 * (lo + hi)) - entropy) < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

PptResult is_ppt(const DensityMatrix& rho) {
  const ComplexMatrix pt =
      linalg::partial_transpose(rho.mat, rho.dims.a, rho.dims.b, linalg::Subsystem::B);
  const auto eig = linalg::hermitian_eig(pt);
  const double min_eig = eig.eigenvalues.back();
  return PptResult{min_eig >= -1e-10, min_eig};
}

namespace {

SpecSeed parse_spec_seed(const std::vector<std::string_view>& items, std::size_t first) {
  SpecSeed out;
  for (std::size_t i = first; i < items.size(); ++i) {
    std::string_view v;
    if (take_key(items[i], "seed", v)) {
      const auto s = text::parse_int(v);
      if (!s) fail(ErrorKind::ParseError, "bad seed in state spec");
      out.seed = static_cast<std::uint64_t>(*s);
    } else if (take_key(items[i], "stream", v)) {
      const auto s = text::parse_int(v);
      if (!s || *s < 0) fail(ErrorKind::ParseError, "bad stream in state spec");
      out.stream = static_cast<std::uint64_t>(*s);
    } else {
      fail(ErrorKind::ParseError, "unknown key in state spec: " + std::string(items[i]));
    }
  }
  return out;
}

SeedSpec resolve_seed(const SpecSeed& s, const SeedSpec& fallback) {
  if (s.seed) return SeedSpec{*s.seed, s.stream};
  return SeedSpec{fallback.master_seed, s.stream != 0 ? s.stream : fallback.stream_index};
}

}  // namespace

State state_from_spec(const std::string& spec, const SeedSpec& default_seed) {
  const std::size_t colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto items = args.empty() ? std::vector<std::string_view>{} : text::split(args, ',');

  if (family == "werner") {
    const auto f = items.size() == 1 ? text::parse_double(items[0]) : std::nullopt;
    if (!f) fail(ErrorKind::ParseError, "werner spec needs a single fidelity, e.g. werner:0.75");
    return werner(*f);
  }
  if (family == "bell") {
    if (items.size() != 4) fail(ErrorKind::ParseError, "bell spec needs four weights");
    std::array<double, 4> w{};
    for (int i = 0; i < 4; ++i) {
      const auto v = text::parse_double(items[i]);
      if (!v) fail(ErrorKind::ParseError, "bad bell weight: " + std::string(items[i]));
      w[i] = *v;
    }
    return bell_diagonal(w);
  }
  if (family == "schmidt") {
    const auto p = items.size() == 1 ? text::parse_double(items[0]) : std::nullopt;
    if (!p) fail(ErrorKind::ParseError, "schmidt spec needs a single weight, e.g. schmidt:0.25");
    return pure_with_schmidt(*p);
  }
  if (family == "ginibre") {
    int k = 4;
    std::size_t first_seed_item = 0;
    if (!items.empty()) {
      std::string_view v;
      if (take_key(items[0], "k", v)) {
        const auto kk = text::parse_int(v);
        if (!kk) fail(ErrorKind::ParseError, "bad ginibre k");
        k = static_cast<int>(*kk);
        first_seed_item = 1;
      }
    }
    const SeedSpec seed = resolve_seed(parse_spec_seed(items, first_seed_item), default_seed);
    return ginibre_mixed(kTwoQubits, k, seed);
  }
  if (family == "haar") {
    const SeedSpec seed = resolve_seed(parse_spec_seed(items, 0), default_seed);
    return haar_pure(kTwoQubits, seed);
  }
  if (family == "separable") {
    int num = 16;
    std::size_t first_seed_item = 0;
    if (!items.empty()) {
      std::string_view v;
      if (take_key(items[0], "K", v)) {
        const auto kk = text::parse_int(v);
        if (!kk) fail(ErrorKind::ParseError, "bad separable K");
        num = static_cast<int>(*kk);
        first_seed_item = 1;
      }
    }
    const SeedSpec seed = resolve_seed(parse_spec_seed(items, first_seed_item), default_seed);
    return random_separable(num, seed);
  }
  if (family == "bell_diag") {
    const SeedSpec seed = resolve_seed(parse_spec_seed(items, 0), default_seed);
    auto gen = seed.engine();
    std::array<double, 4> w{};
    double total = 0.0;
    for (double& x : w) {
      x = -std::log(1.0 - gen.uniform());
      total += x;
    }
    for (double& x : w) x /= total;
    return bell_diagonal(w);
  }
  fail(ErrorKind::ParseError, "unknown state family: " + family);
}

Sampler sampler_from_spec(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);

  auto seeded_ref = [](std::string base) {
    return [base](std::uint64_t master, std::uint64_t index, const State&) {
      std::ostringstream os;
      os << base << (base.find(':') == std::string::npos ? ":" : ",") << "seed=" << master
         << ",stream=" << index;
      return os.str();
    };
  };

  if (family == "ginibre") {
    int k = 4;
    if (!args.empty()) {
      std::string_view v;
      if (!take_key(args, "k", v)) fail(ErrorKind::ParseError, "ginibre sampler takes k=<rank>");
      const auto kk = text::parse_int(v);
      if (!kk) fail(ErrorKind::ParseError, "bad ginibre k");
      k = static_cast<int>(*kk);
    }
    std::ostringstream name;
    name << "ginibre:k=" << k;
    return Sampler{name.str(),
                   [k](const SeedSpec& s) { return State{ginibre_mixed(kTwoQubits, k, s)}; },
                   seeded_ref(name.str())};
  }
  if (family == "haar") {
    if (!args.empty()) fail(ErrorKind::ParseError, "haar sampler takes no arguments");
    return Sampler{"haar", [](const SeedSpec& s) { return State{haar_pure(kTwoQubits, s)}; },
                   seeded_ref("haar")};
  }
  if (family == "separable") {
    int num = 16;
    if (!args.empty()) {
      std::string_view v;
      if (!take_key(args, "K", v)) fail(ErrorKind::ParseError, "separable sampler takes K=<n>");
      const auto kk = text::parse_int(v);
      if (!kk) fail(ErrorKind::ParseError, "bad separable K");
      num = static_cast<int>(*kk);
    }
    std::ostringstream name;
    name << "separable:K=" << num;
    return Sampler{name.str(),
                   [num](const SeedSpec& s) { return State{random_separable(num, s)}; },
                   seeded_ref(name.str())};
  }
  if (family == "bell_diag") {
    if (!args.empty()) fail(ErrorKind::ParseError, "bell_diag sampler takes no arguments");
    return Sampler{"bell_diag",
                   [](const SeedSpec& s) {
                     auto gen = s.engine();
                     std::array<double, 4> w{};
                     double total = 0.0;
                     for (double& x : w) {
                       x = -std::log(1.0 - gen.uniform());
                       total += x;
                     }
                     for (double& x : w) x /= total;
                     return State{bell_diagonal(w)};
                   },
                   seeded_ref("bell_diag")};
  }
  fail(ErrorKind::ParseError, "unknown sampler: " + family);
}

}  // namespace entorder::states
