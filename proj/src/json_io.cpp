#include "entorder/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "entorder/text.hpp"

namespace entorder::io {

namespace {

const Json& require_key(const Json& j, const char* key, const char* what) {
  const auto it = j.find(key);
  if (it == j.end())
    fail(ErrorKind::ParseError, std::string(what) + " is missing required key \"" + key + "\"");
  return *it;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::ParseError, std::string(what) + " has a non-finite entry");
}

}  // namespace

Json matrix_to_json(const linalg::ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

linalg::ComplexMatrix matrix_from_json(const Json& j) {
  try {
    const std::size_t rows = require_key(j, "rows", "matrix").get<std::size_t>();
    const std::size_t cols = require_key(j, "cols", "matrix").get<std::size_t>();
    const Json& re = require_key(j, "re", "matrix");
    const Json& im = require_key(j, "im", "matrix");
    if (re.size() != rows || im.size() != rows)
      fail(ErrorKind::ParseError, "matrix re/im row counts disagree with \"rows\"");
    linalg::ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (re[r].size() != cols || im[r].size() != cols)
        fail(ErrorKind::ParseError, "matrix re/im column counts disagree with \"cols\"");
      for (std::size_t c = 0; c < cols; ++c) {
        const double x = re[r][c].get<double>();
        const double y = im[r][c].get<double>();
        require_finite(x, "matrix");
        require_finite(y, "matrix");
        m(r, c) = {x, y};
      }
    }
    return m;
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, std::string("bad matrix JSON: ") + e.what());
  }
}

Json state_to_json(const states::State& s) {
  const states::Dims dims = states::state_dims(s);
  if (const auto* psi = std::get_if<states::PureState>(&s)) {
    Json re = Json::array();
    Json im = Json::array();
    for (const auto& a : psi->amp) {
      re.push_back(a.real());
      im.push_back(a.imag());
    }
    return Json{{"dims", {dims.a, dims.b}}, {"amp_re", std::move(re)}, {"amp_im", std::move(im)}};
  }
  return Json{{"dims", {dims.a, dims.b}},
              {"matrix", matrix_to_json(std::get<states::DensityMatrix>(s).mat)}};
}

states::State state_from_json(const Json& j) {
  try {
    const Json& dims_j = require_key(j, "dims", "state");
    if (!dims_j.is_array() || dims_j.size() != 2)
      fail(ErrorKind::ParseError, "state \"dims\" must be [dA, dB]");
    const states::Dims dims{dims_j[0].get<int>(), dims_j[1].get<int>()};
    if (dims.a < 1 || dims.b < 1 || dims.a > 6 || dims.b > 6)
      fail(ErrorKind::DomainError, "state dims outside the supported 1..6 range");

    if (j.contains("matrix")) {
      return states::validate(matrix_from_json(j["matrix"]), dims);
    }
    const Json& re = require_key(j, "amp_re", "pure state");
    const Json& im = require_key(j, "amp_im", "pure state");
    const std::size_t n = static_cast<std::size_t>(dims.total());
    if (re.size() != n || im.size() != n)
      fail(ErrorKind::ParseError, "pure state amplitude length disagrees with dims");
    states::PureState psi{dims, std::vector<states::Complex>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const double x = re[i].get<double>();
      const double y = im[i].get<double>();
      require_finite(x, "pure state");
      require_finite(y, "pure state");
      psi.amp[i] = {x, y};
    }
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "pure state norm deviates from 1 by " << std::abs(norm - 1.0);
      fail(ErrorKind::DomainError, os.str());
    }
    return psi;
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, std::string("bad state JSON: ") + e.what());
  }
}

states::State load_state_file(const std::string& path) {
  return state_from_json(parse_json_file(path));
}

void save_state_file(const states::State& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << state_to_json(s).dump(2) << "\n";
  if (!out) fail(ErrorKind::IoError, "failed writing " + path);
}

Json measure_value_to_json(measures::MeasureId id, const measures::MeasureValue& v) {
  return Json{{"measure", std::string(measures::measure_name(id))},
              {"value", v.value},
              {"status", v.status == measures::Status::exact ? "exact" : "upper_bound"},
              {"converged", v.diagnostics.converged},
              {"iterations", v.diagnostics.iterations},
              {"restarts", v.diagnostics.restarts_used}};
}

Json optimizer_to_json(const measures::OptimizerConfig& cfg) {
  return Json{{"K", cfg.mixture_size},
              {"restarts", cfg.restarts},
              {"max_iterations", cfg.max_iterations},
              {"initial_step", cfg.initial_step},
              {"gradient_tolerance", cfg.gradient_tolerance},
              {"value_tolerance", cfg.value_tolerance},
              {"seed", {{"master_seed", cfg.seed.master_seed}, {"stream_index", cfg.seed.stream_index}}}};
}

measures::OptimizerConfig optimizer_from_json(const Json& j) {
  measures::OptimizerConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "K") {
        cfg.mixture_size = value.get<int>();
      } else if (key == "restarts") {
        cfg.restarts = value.get<int>();
      } else if (key == "max_iterations") {
        cfg.max_iterations = value.get<int>();
      } else if (key == "initial_step") {
        cfg.initial_step = value.get<double>();
      } else if (key == "gradient_tolerance") {
        cfg.gradient_tolerance = value.get<double>();
      } else if (key == "value_tolerance") {
        cfg.value_tolerance = value.get<double>();
      } else if (key == "seed") {
        for (const auto& [skey, svalue] : value.items()) {
          if (skey == "master_seed") {
            cfg.seed.master_seed = svalue.get<std::uint64_t>();
          } else if (skey == "stream_index") {
            cfg.seed.stream_index = svalue.get<std::uint64_t>();
          } else {
            fail(ErrorKind::ParseError, "unknown optimizer seed key \"" + skey + "\"");
          }
        }
      } else {
        fail(ErrorKind::ParseError, "unknown optimizer config key \"" + key + "\"");
      }
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, std::string("bad optimizer config: ") + e.what());
  }
  if (cfg.mixture_size < 1 || cfg.restarts < 1 || cfg.max_iterations < 1)
    fail(ErrorKind::DomainError, "optimizer counts must be at least 1");
  return cfg;
}

Json witness_to_json(const ordering::ViolationWitness& w) {
  return Json{{"a", w.state_a},
              {"b", w.state_b},
              {"e1", {w.e1_a, w.e1_b}},
              {"e2", {w.e2_a, w.e2_b}},
              {"margins", {w.margin1, w.margin2}}};
}

Json report_to_json(const ordering::OrderingReport& r) {
  Json violations = Json::array();
  for (const auto& w : r.violations) violations.push_back(witness_to_json(w));
  return Json{{"measures",
               {std::string(measures::measure_name(r.measure1)),
                std::string(measures::measure_name(r.measure2))}},
              {"n", r.samples},
              {"delta", r.delta},
              {"delta_effective", r.delta_effective},
              {"pairs", r.pairs_compared},
              {"agreements", r.agreements},
              {"ties", r.ties},
              {"violation_count", r.violation_count},
              {"violations", std::move(violations)}};
}

Json sandwich_to_json(const ordering::SandwichDemo& d, const std::string& rho_ref) {
  return Json{{"rho", rho_ref},
              {"epsilon", d.epsilon},
              {"measures",
               {std::string(measures::measure_name(d.measure1)),
                std::string(measures::measure_name(d.measure2))}},
              {"phi", state_to_json(states::State{d.phi})},
              {"psi", state_to_json(states::State{d.psi})},
              {"values",
               {{"e1_phi", d.e1_phi},
                {"e1_rho", d.e1_rho},
                {"e1_psi", d.e1_psi},
                {"e2_phi", d.e2_phi},
                {"e2_rho", d.e2_rho},
                {"e2_psi", d.e2_psi}}},
              {"chain_holds",
               {{"e1_upper", d.chain1_upper},
                {"e1_lower", d.chain1_lower},
                {"e2_upper", d.chain2_upper},
                {"e2_lower", d.chain2_lower}}}};
}

Json scan_to_json(const ordering::ScanTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r{{t.parameter_name, row.parameter}};
    for (std::size_t m = 0; m < t.ids.size(); ++m) {
      const std::string name(measures::measure_name(t.ids[m]));
      const auto& cell = row.cells[m];
      if (!cell.error.empty()) {
        r[name] = nullptr;
        r[name + "_status"] = "error: " + cell.error;
      } else {
        r[name] = cell.value.value;
        r[name + "_status"] =
            cell.value.status == measures::Status::exact ? "exact" : "upper_bound";
      }
    }
    rows.push_back(std::move(r));
  }
  return Json{{"family", t.family}, {"parameter", t.parameter_name}, {"rows", std::move(rows)}};
}

std::string scan_to_csv(const ordering::ScanTable& t) {
  std::ostringstream os;
  os << t.parameter_name;
  for (const auto id : t.ids) {
    const std::string name(measures::measure_name(id));
    os << "," << name << "," << name << "_status";
  }
  os << "\n";
  for (const auto& row : t.rows) {
    os << text::format_double(row.parameter);
    for (const auto& cell : row.cells) {
      if (!cell.error.empty()) {
        os << ",,error";
      } else {
        os << "," << text::format_double(cell.value.value) << ","
           << (cell.value.status == measures::Status::exact ? "exact" : "upper_bound");
      }
    }
    os << "\n";
  }
  return os.str();
}

Json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorKind::IoError, "failed reading " + path);
  return parse_json_text(buf.str(), path);
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::ParseError, what + ": " + e.what());
  }
}

}  // namespace entorder::io
