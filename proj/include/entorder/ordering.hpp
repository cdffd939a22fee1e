#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entorder/measures.hpp"

namespace entorder::ordering {

using measures::MeasureId;
using measures::OptimizerConfig;
using states::DensityMatrix;
using states::PureState;
using states::SeedSpec;

// A state pair ranked oppositely by the two measures, with both strict
// margins above delta: E1(a) < E1(b) while E2(a) > E2(b).
struct ViolationWitness {
  std::string state_a;  // reference: family-spec string or file path
  std::string state_b;
  double e1_a = 0.0, e1_b = 0.0;
  double e2_a = 0.0, e2_b = 0.0;
  double margin1 = 0.0;  // e1_b - e1_a
  double margin2 = 0.0;  // e2_a - e2_b
};

enum class PairClass { agreement, violation, tie };

// Symmetric in pair order; a tie is a pair within delta on either measure.
PairClass classify_pair(double e1_a, double e1_b, double e2_a, double e2_b, double delta);

struct OrderingReport {
  MeasureId measure1 = MeasureId::FormationClosedForm;
  MeasureId measure2 = MeasureId::RelativeEntropyPPT;
  std::size_t samples = 0;
  double delta = 0.0;
  // classification margin: delta plus both measures' evaluation slack, so
  // a recorded violation is never attributable to optimizer noise
  double delta_effective = 0.0;
  std::size_t pairs_compared = 0;
  std::size_t agreements = 0;
  std::size_t ties = 0;
  std::size_t violation_count = 0;
  std::vector<ViolationWitness> violations;  // verified exemplars
};

// Classifies every index pair of two aligned value lists.
OrderingReport same_order(std::span<const double> e1, std::span<const double> e2, double delta);

// Schmidt-form pure states at E_F(rho) +/- epsilon (the closed form sets
// the scale). Throws EpsilonTooLarge outside (0, min(E, 1-E)).
std::pair<PureState, PureState> sandwich_construct(const DensityMatrix& rho, double epsilon);

struct SandwichDemo {
  double epsilon = 0.0;
  MeasureId measure1 = MeasureId::FormationClosedForm;
  MeasureId measure2 = MeasureId::RelativeEntropyPPT;
  PureState phi;  // upper pinch state
  PureState psi;  // lower pinch state
  double e1_phi = 0.0, e1_rho = 0.0, e1_psi = 0.0;
  double e2_phi = 0.0, e2_rho = 0.0, e2_psi = 0.0;
  bool chain1_upper = false;  // e1_phi >= e1_rho
  bool chain1_lower = false;  // e1_rho >= e1_psi
  bool chain2_upper = false;
  bool chain2_lower = false;
};

SandwichDemo sandwich_demo(const DensityMatrix& rho, const std::string& rho_ref, double epsilon,
                           MeasureId id2, const OptimizerConfig& cfg, int threads = 1);

// If the two measures disagree on rho by more than 2*delta plus their
// combined slack, builds the midpoint pure state and returns the verified
// witness pair; the margins are re-checked with fresh optimizer seeds.
std::optional<ViolationWitness> witness_from_gap(const DensityMatrix& rho,
                                                 const std::string& rho_ref, MeasureId id1,
                                                 MeasureId id2, const OptimizerConfig& cfg,
                                                 double delta, int threads = 1);

// Same contract, reusing already-computed values of both measures on rho.
std::optional<ViolationWitness> witness_from_values(const DensityMatrix& rho,
                                                    const std::string& rho_ref, double e1_rho,
                                                    double e2_rho, MeasureId id1, MeasureId id2,
                                                    const OptimizerConfig& cfg, double delta,
                                                    int threads = 1);

struct SearchConfig {
  std::size_t samples = 0;
  states::Sampler sampler;
  MeasureId measure1 = MeasureId::FormationClosedForm;
  MeasureId measure2 = MeasureId::RelativeEntropyPPT;
  OptimizerConfig optimizer;
  double delta = 1e-3;
  std::uint64_t seed = 1;
  std::size_t pair_cap = 1'000'000;      // seeded subsampling above this
  std::size_t listed_pair_cap = 100;     // pairwise exemplars kept in the report
  int threads = 0;
};

// Samples n states, evaluates both measures on each, classifies all pairs
// (or a seeded subset above the cap), and runs the witness construction on
// every sample. Deterministic given the seed, for any thread count.
OrderingReport random_search(const SearchConfig& cfg);

struct ScanCell {
  measures::MeasureValue value;
  std::string error;  // non-empty when the point failed
};

struct ScanRow {
  double parameter = 0.0;
  std::vector<ScanCell> cells;  // aligned with the requested measure ids
};

struct ScanTable {
  std::string family;
  std::string parameter_name;
  std::vector<MeasureId> ids;
  std::vector<ScanRow> rows;
};

// Families: werner (parameter F) and schmidt (parameter p).
ScanTable scan_family(const std::string& family, std::span<const double> grid,
                      std::span<const MeasureId> ids, const OptimizerConfig& cfg,
                      int threads = 0);

}  // namespace entorder::ordering
