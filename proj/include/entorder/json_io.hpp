#pragma once

#include <string>

#include <json.hpp>

#include "entorder/ordering.hpp"

namespace entorder::io {

using Json = nlohmann::ordered_json;

// Matrix encoding used repo-wide:
// {"rows":n,"cols":m,"re":[[...]],"im":[[...]]} row-major
Json matrix_to_json(const linalg::ComplexMatrix& m);
linalg::ComplexMatrix matrix_from_json(const Json& j);

// Mixed: {"dims":[dA,dB],"matrix":{...}}; pure: {"dims":[dA,dB],"amp_re":[...],"amp_im":[...]}
Json state_to_json(const states::State& s);
states::State state_from_json(const Json& j);
states::State load_state_file(const std::string& path);
void save_state_file(const states::State& s, const std::string& path);

Json measure_value_to_json(measures::MeasureId id, const measures::MeasureValue& v);

Json optimizer_to_json(const measures::OptimizerConfig& cfg);
// Strict: unknown keys are rejected.
measures::OptimizerConfig optimizer_from_json(const Json& j);

Json witness_to_json(const ordering::ViolationWitness& w);
Json report_to_json(const ordering::OrderingReport& r);
Json sandwich_to_json(const ordering::SandwichDemo& d, const std::string& rho_ref);

Json scan_to_json(const ordering::ScanTable& t);
std::string scan_to_csv(const ordering::ScanTable& t);

// Parses a text file as JSON, mapping stream and parse failures onto the
// IoError / ParseError kinds.
Json parse_json_file(const std::string& path);
Json parse_json_text(const std::string& text, const std::string& what);

}  // namespace entorder::io
