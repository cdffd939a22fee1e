#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "entorder/linalg.hpp"
#include "entorder/rng.hpp"

namespace entorder::states {

using linalg::Complex;
using linalg::ComplexMatrix;

struct Dims {
  int a = 2;
  int b = 2;
  int total() const { return a * b; }
  bool operator==(const Dims&) const = default;
};

inline constexpr Dims kTwoQubits{2, 2};

// Deterministic seeding: (master_seed, stream_index) fixes every sample
// bit-exactly. Sub-streams chain through the same golden-ratio hash.
struct SeedSpec {
  std::uint64_t master_seed = 1;
  std::uint64_t stream_index = 0;

  std::uint64_t value() const { return master_seed ^ rng::golden_hash(stream_index); }
  SeedSpec stream(std::uint64_t i) const { return SeedSpec{value(), i}; }
  rng::Xoshiro256pp engine() const { return rng::Xoshiro256pp(value()); }
  bool operator==(const SeedSpec&) const = default;
};

struct DensityMatrix {
  Dims dims;
  ComplexMatrix mat;
};

struct PureState {
  Dims dims;
  std::vector<Complex> amp;

  ComplexMatrix projector() const;
  DensityMatrix to_density() const { return DensityMatrix{dims, projector()}; }
  double norm() const;
};

using State = std::variant<DensityMatrix, PureState>;

DensityMatrix to_density(const State& s);
Dims state_dims(const State& s);

struct ValidationStats {
  bool clipped = false;
  double min_eigenvalue = 0.0;
  double trace_defect = 0.0;
  double hermiticity_defect = 0.0;
};

// Checks the three density-matrix invariants. Eigenvalues in
// (kEigClipFloor, 0) are clipped to zero and the state renormalized;
// matrices that need no clipping are returned unchanged.
DensityMatrix validate(const ComplexMatrix& mat, Dims dims, ValidationStats* stats = nullptr);

// Bell basis, fixed order: Phi+, Phi-, Psi+, Psi-
const std::array<std::array<Complex, 4>, 4>& bell_basis();
PureState bell_phi_plus();

// F |Phi+><Phi+| + (1-F)/3 (I - |Phi+><Phi+|); entangled iff F > 1/2
DensityMatrix werner(double fidelity);
DensityMatrix bell_diagonal(const std::array<double, 4>& weights);

PureState haar_pure(Dims dims, const SeedSpec& seed);
DensityMatrix ginibre_mixed(Dims dims, int k, const SeedSpec& seed);
// 2x2 only: Dirichlet-uniform mixture of K Haar product states
DensityMatrix random_separable(int num_components, const SeedSpec& seed);
// sqrt(p)|00> + sqrt(1-p)|11>
PureState pure_with_schmidt(double p);

double binary_entropy(double p);
// branch p in [0, 1/2], bisection to |h(p) - E| < 1e-12
double invert_binary_entropy(double entropy);

struct PptResult {
  bool ppt = true;
  double min_eigenvalue = 0.0;
};
PptResult is_ppt(const DensityMatrix& rho);

// Family specs: werner:F | bell:l1,l2,l3,l4 | schmidt:p |
// ginibre:k=4[,seed=7][,stream=3] | haar[:seed=7[,stream=3]] |
// separable:K=16[,seed=7][,stream=3]
State state_from_spec(const std::string& spec, const SeedSpec& default_seed);

struct Sampler {
  std::string name;                          // spec without seed/stream keys
  std::function<State(const SeedSpec&)> draw;
  // Reference string that reproduces sample i of the given master seed.
  std::function<std::string(std::uint64_t master_seed, std::uint64_t index, const State&)> ref;
};

// Sampler specs: ginibre:k=4 | haar | separable:K=16 | bell_diag
Sampler sampler_from_spec(const std::string& spec);

}  // namespace entorder::states
