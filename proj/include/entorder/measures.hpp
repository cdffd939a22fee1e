#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entorder/states.hpp"

namespace entorder::measures {

using states::DensityMatrix;
using states::PureState;
using states::State;

enum class MeasureId {
  EntropyOfEntanglement,
  FormationClosedForm,
  FormationSearch,
  RelativeEntropyPPT,
};

std::string_view measure_name(MeasureId id);
std::optional<MeasureId> measure_from_name(std::string_view name);

// Evaluation slack used when deciding whether a gap is real: exact routes
// resolve to 1e-9, optimizer routes to 5e-3.
double measure_tolerance(MeasureId id);

enum class Status { exact, upper_bound };

struct Diagnostics {
  int restarts_used = 0;
  long iterations = 0;
  double best_gradient_norm = 0.0;
  bool converged = true;
};

struct MeasureValue {
  double value = 0.0;
  Status status = Status::exact;
  Diagnostics diagnostics;
};

struct Ensemble {
  std::vector<double> weights;
  std::vector<PureState> members;

  DensityMatrix average_state() const;
};

struct BlochAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2pi)

  std::array<states::Complex, 2> ket() const;
};

struct SeparableAnsatz {
  std::vector<double> weights;                          // simplex, length K
  std::vector<std::array<BlochAngles, 2>> local_pairs;  // length K

  DensityMatrix to_density() const;
};

struct OptimizerConfig {
  int mixture_size = 16;  // K
  int restarts = 8;
  int max_iterations = 2000;
  double initial_step = 0.25;
  double gradient_tolerance = 1e-7;
  double value_tolerance = 1e-9;
  states::SeedSpec seed;
};

MeasureValue entropy_of_entanglement(const PureState& psi);

// Wootters spin-flip concurrence, 2x2 only
double concurrence(const DensityMatrix& rho);
MeasureValue eof_closed_form(const DensityMatrix& rho);

struct EofSearchResult {
  MeasureValue value;  // status upper_bound
  Ensemble ensemble;
};
// Direct minimization of the ensemble-average entanglement over
// unitary-parametrized size-4 decompositions. Kept independent of the
// closed form so the two can cross-check each other.
EofSearchResult eof_decomposition_search(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                         int threads = 1);

struct RelEntResult {
  MeasureValue value;  // status upper_bound
  SeparableAnsatz argmin;
};
RelEntResult relative_entropy_entanglement(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                           int threads = 1);

// E_R relabeled as a bound on the distillable entanglement, which has no
// direct algorithm.
MeasureValue distillable_upper_bound(const DensityMatrix& rho, const OptimizerConfig& cfg,
                                     int threads = 1);

MeasureValue evaluate(MeasureId id, const State& state, const OptimizerConfig& cfg,
                      int threads = 1);

// Internals of the E_R objective, exposed so tests can pit the analytic
// gradient against finite differences on arbitrary parameter points.
namespace relent {

// params layout: K softmax logits, then (theta_a, phi_a, theta_b, phi_b)
// per component
std::size_t param_count(int mixture_size);
std::vector<double> params_from_ansatz(const SeparableAnsatz& ansatz);
SeparableAnsatz ansatz_from_params(std::span<const double> params, int mixture_size);

double objective(const DensityMatrix& rho, std::span<const double> params, int mixture_size,
                 double barrier_tau);
std::vector<double> analytic_gradient(const DensityMatrix& rho, std::span<const double> params,
                                      int mixture_size, double barrier_tau);

}  // namespace relent

}  // namespace entorder::measures
