#include "qhmm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qhmm/errors.hpp"

namespace qhmm::io {

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw ParseError("model file: " + what); }

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

double number_from_json(const json& value) {
  if (!value.is_number()) schema_error("expected a number, got " + value.dump());
  return value.get<double>();
}

RealMatrix real_matrix_from_json(const json& value) {
  const ComplexMatrix m = complex_matrix_from_json(value);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) schema_error("classical matrices must be real");
  return m.real();
}

json real_matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Alphabet alphabet_from_json(const json& value) {
  if (!value.is_array()) schema_error("\"alphabet\" must be an array of strings");
  std::vector<std::string> symbols;
  for (const auto& s : value) {
    if (!s.is_string()) schema_error("alphabet symbols must be strings");
    symbols.push_back(s.get<std::string>());
  }
  try {
    return Alphabet(std::move(symbols));
  } catch (const DomainError& e) {
    schema_error(e.what());
  }
}

const json& symbol_entry(const json& table, const std::string& symbol, const char* field) {
  if (!table.is_object()) schema_error(std::string("\"") + field + "\" must be an object keyed by symbol");
  if (!table.contains(symbol)) schema_error(std::string("\"") + field + "\" has no entry for symbol '" + symbol + "'");
  return table.at(symbol);
}

void check_symbol_keys(const json& table, const Alphabet& alphabet, const char* field) {
  for (const auto& [key, _] : table.items()) {
    if (!alphabet.find(key)) schema_error(std::string("\"") + field + "\" has unknown symbol '" + key + "'");
  }
}

json rounded_complex(Complex z) { return json::array({round12(z.real()), round12(z.imag())}); }

json number_or_null(double v) { return std::isfinite(v) ? json(round12(v)) : json(nullptr); }

json cluster_to_json(const EigenCluster& c) {
  return {{"lambda", rounded_complex(c.value)},
          {"abs", round12(std::abs(c.value))},
          {"multiplicity", c.multiplicity},
          {"alpha", rounded_complex(c.alpha)}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Numbers

double round12(double value) {
  if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string format_roundtrip(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_complex(Complex z) {
  const double im = z.imag();
  if (im == 0.0 || std::abs(im) < 1e-15 * std::max(1.0, std::abs(z.real()))) {
    return format_number(z.real());
  }
  return format_number(z.real()) + (im < 0 ? "-" : "+") + format_number(std::abs(im)) + "i";
}

// ---------------------------------------------------------------------------
// Complex values and matrices

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& value) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  schema_error("expected a number or [re, im], got " + value.dump());
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix complex_matrix_from_json(const json& value) {
  if (!value.is_array() || value.empty()) schema_error("matrices must be nonempty arrays of rows");
  const auto rows = static_cast<Eigen::Index>(value.size());
  if (!value[0].is_array() || value[0].empty()) schema_error("matrix rows must be nonempty arrays");
  const auto cols = static_cast<Eigen::Index>(value[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = value[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionError("matrix rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Models

json to_json(const ClassicalHmm& model) {
  json transition = json::object();
  for (std::size_t x = 0; x < model.alphabet().size(); ++x) {
    transition[model.alphabet().symbol(x)] = real_matrix_to_json(model.transition(x));
  }
  json initial = json::array();
  for (Eigen::Index i = 0; i < model.initial().size(); ++i) initial.push_back(model.initial()(i));
  return {{"type", "classical"},
          {"alphabet", model.alphabet().symbols()},
          {"dim", model.dim()},
          {"transition", std::move(transition)},
          {"initial", std::move(initial)}};
}

json to_json(const Qhmm& model) {
  json kraus = json::object();
  for (std::size_t x = 0; x < model.alphabet().size(); ++x) {
    json family = json::array();
    for (const auto& k : model.kraus(x)) family.push_back(matrix_to_json(k));
    kraus[model.alphabet().symbol(x)] = std::move(family);
  }
  return {{"type", "quantum"},
          {"alphabet", model.alphabet().symbols()},
          {"dim", model.dim()},
          {"kraus", std::move(kraus)},
          {"initial", matrix_to_json(model.initial())}};
}

json to_json(const AnyModel& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

AnyModel model_from_json(const json& doc) {
  if (!doc.is_object()) schema_error("top level must be an object");
  const json& type = require(doc, "type");
  if (!type.is_string()) schema_error("\"type\" must be a string");
  const Alphabet alphabet = alphabet_from_json(require(doc, "alphabet"));
  const json& dim_value = require(doc, "dim");
  if (!dim_value.is_number_integer() || dim_value.get<long long>() < 1) {
    schema_error("\"dim\" must be a positive integer");
  }
  const auto dim = static_cast<Eigen::Index>(dim_value.get<long long>());

  if (type == "classical") {
    const json& table = require(doc, "transition");
    if (!table.is_object()) schema_error("\"transition\" must be an object keyed by symbol");
    check_symbol_keys(table, alphabet, "transition");
    std::vector<RealMatrix> transitions;
    for (const auto& s : alphabet.symbols()) {
      transitions.push_back(real_matrix_from_json(symbol_entry(table, s, "transition")));
    }
    const json& init = require(doc, "initial");
    if (!init.is_array()) schema_error("classical \"initial\" must be an array");
    RealVector pi(static_cast<Eigen::Index>(init.size()));
    for (std::size_t i = 0; i < init.size(); ++i) pi(static_cast<Eigen::Index>(i)) = number_from_json(init[i]);
    if (pi.size() != dim) throw DimensionError("initial vector length does not match \"dim\"");
    return ClassicalHmm(alphabet, std::move(transitions), std::move(pi));
  }
  if (type == "quantum") {
    const json& table = require(doc, "kraus");
    if (!table.is_object()) schema_error("\"kraus\" must be an object keyed by symbol");
    check_symbol_keys(table, alphabet, "kraus");
    std::vector<std::vector<ComplexMatrix>> kraus;
    for (const auto& s : alphabet.symbols()) {
      const json& family = symbol_entry(table, s, "kraus");
      if (!family.is_array()) schema_error("Kraus family for '" + s + "' must be an array of matrices");
      auto& out = kraus.emplace_back();
      for (const auto& k : family) out.push_back(complex_matrix_from_json(k));
    }
    ComplexMatrix rho = complex_matrix_from_json(require(doc, "initial"));
    if (rho.rows() != dim) throw DimensionError("initial state size does not match \"dim\"");
    return Qhmm(alphabet, std::move(kraus), std::move(rho));
  }
  schema_error("\"type\" must be \"classical\" or \"quantum\"");
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return model_from_json(parse_json_text(buffer.str()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Reports

json to_json(const ToleranceConfig& tol) {
  return {{"stoch", tol.stoch},       {"cptp", tol.cptp},   {"herm", tol.herm},
          {"psd", tol.psd},           {"eig_zero", tol.eig_zero},
          {"eig_dedup", tol.eig_dedup}, {"rank", tol.rank}, {"prob", tol.prob}};
}

json to_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"residual", number_or_null(c.residual)},
                      {"tolerance", round12(c.tolerance)},
                      {"passed", c.passed}});
  }
  return {{"valid", report.valid()}, {"checks", std::move(checks)}};
}

json to_json(const SpectrumReport& report) {
  json nonzero = json::array();
  for (const auto& c : report.distinct_nonzero) {
    json entry = cluster_to_json(c);
    entry["effective"] = std::abs(c.alpha) > report.tolerances_used.eig_zero;
    nonzero.push_back(std::move(entry));
  }
  json raw = json::array();
  for (const auto& z : report.raw_eigenvalues) raw.push_back(rounded_complex(z));
  return {{"dimension", report.raw_eigenvalues.size()},
          {"spectral_radius", round12(report.spectral_radius)},
          {"raw_count", report.raw_count()},
          {"effective_count", report.effective_count},
          {"distinct_nonzero", std::move(nonzero)},
          {"zero_cluster", report.zero_cluster ? cluster_to_json(*report.zero_cluster) : json(nullptr)},
          {"diagonalizable", report.diagonalizable},
          {"condition_estimate", number_or_null(report.condition_estimate)},
          {"self_test_residual", number_or_null(report.self_test_residual)},
          {"self_test_max_length", report.self_test_max_length},
          {"reliable", report.reliable()},
          {"tolerances", to_json(report.tolerances_used)},
          {"raw_eigenvalues", std::move(raw)}};
}

json to_json(const BoundReport& b) {
  return {{"spectrum_size", b.spectrum_size},
          {"raw_spectrum_size", b.raw_spectrum_size},
          {"quantum_min_dim", b.quantum_min_dim},
          {"classical_min_dim", b.classical_min_dim},
          {"c_q_lower_bits", round12(b.c_q_lower_bits)},
          {"c_c_lower_bits", round12(b.c_c_lower_bits)},
          {"raw_quantum_min_dim", b.raw_quantum_min_dim},
          {"raw_classical_min_dim", b.raw_classical_min_dim}};
}

json to_json(const EquivalenceVerdict& v) {
  json moments = json::array();
  for (const auto& m : v.moment_checks) {
    moments.push_back({{"L", m.length}, {"lhs", round12(m.lhs)}, {"rhs", round12(m.rhs)},
                       {"residual", round12(m.residual)}});
  }
  json vander = json::array();
  for (const auto& [l, r] : v.vandermonde) vander.push_back({{"L", l}, {"residual", round12(r)}});
  json out = {{"verdict", to_string(v.outcome)},
              {"reason", v.reason},
              {"spectra_match", v.spectra_match},
              {"coefficients_match", v.coefficients_match},
              {"max_eigenvalue_gap", round12(v.max_eigenvalue_gap)},
              {"max_coefficient_gap", round12(v.max_coefficient_gap)},
              {"moment_checks", std::move(moments)},
              {"vandermonde_residuals", std::move(vander)}};
  if (v.brute_force_match) {
    out["brute_force"] = {{"match", *v.brute_force_match},
                          {"max_length", v.brute_force_max_length},
                          {"max_gap", round12(v.brute_force_max_gap)}};
  } else {
    out["brute_force"] = nullptr;
  }
  return out;
}

json to_json(const TransferOperator& op) {
  json boundary = json::array();
  json initial = json::array();
  for (Eigen::Index i = 0; i < op.boundary.size(); ++i) {
    boundary.push_back(complex_to_json(op.boundary(i)));
    initial.push_back(complex_to_json(op.initial(i)));
  }
  return {{"kind", to_string(op.kind)},
          {"dims", {op.dim_a, op.dim_b}},
          {"size", op.size()},
          {"matrix", matrix_to_json(op.matrix)},
          {"boundary", std::move(boundary)},
          {"initial", std::move(initial)}};
}

TransferOperator transfer_from_json(const json& doc) {
  TransferOperator op;
  const auto kind = require(doc, "kind").get<std::string>();
  if (kind == "quantum") {
    op.kind = TransferKind::quantum;
  } else if (kind == "classical") {
    op.kind = TransferKind::classical;
  } else if (kind == "mixed") {
    op.kind = TransferKind::mixed;
  } else {
    throw ParseError("unknown transfer kind '" + kind + "'");
  }
  const json& dims = require(doc, "dims");
  if (!dims.is_array() || dims.size() != 2) throw ParseError("\"dims\" must be [dim_a, dim_b]");
  op.dim_a = dims[0].get<std::size_t>();
  op.dim_b = dims[1].get<std::size_t>();
  op.matrix = complex_matrix_from_json(require(doc, "matrix"));
  auto read_vector = [](const json& arr) {
    if (!arr.is_array()) throw ParseError("transfer vectors must be arrays");
    ComplexVector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(arr[i]);
    return v;
  };
  op.boundary = read_vector(require(doc, "boundary"));
  op.initial = read_vector(require(doc, "initial"));
  const auto n = op.matrix.rows();
  if (op.matrix.cols() != n || op.boundary.size() != n || op.initial.size() != n) {
    throw DimensionError("transfer operator parts have inconsistent sizes");
  }
  return op;
}

json to_json(const WordDistribution& dist, const Alphabet& alphabet) {
  json entries = json::array();
  for (std::size_t k = 0; k < dist.size(); ++k) {
    entries.push_back({{"word", format_word(alphabet, dist.words[k])},
                       {"probability", round12(dist.probabilities[k])}});
  }
  return {{"length", dist.length},
          {"total", round12(dist.total)},
          {"most_negative", round12(dist.most_negative)},
          {"entries", std::move(entries)}};
}

json to_json(const CompressedQhmm& c) {
  json doc = to_json(c.model);
  json phases = json::array();
  for (const auto& p : c.phases) {
    phases.push_back({{"from", p.from}, {"to", p.to}, {"symbol", c.source.alphabet().symbol(p.symbol)},
                      {"phase", p.phase}});
  }
  json sv = json::array();
  for (Eigen::Index k = 0; k < c.gram_singular_values.size(); ++k) sv.push_back(c.gram_singular_values(k));
  doc["provenance"] = {{"source", to_json(c.source)},
                       {"phase_label", c.phase_label},
                       {"phases", std::move(phases)},
                       {"isometry", matrix_to_json(c.isometry)},
                       {"gram_singular_values", std::move(sv)},
                       {"verified_length", c.verified_length},
                       {"max_word_deviation", c.max_word_deviation},
                       {"warnings", c.warnings}};
  return doc;
}

// ---------------------------------------------------------------------------
// CSV

std::string distribution_csv(const WordDistribution& dist, const Alphabet& alphabet) {
  std::string out = "word,probability\n";
  for (std::size_t k = 0; k < dist.size(); ++k) {
    std::string word = format_word(alphabet, dist.words[k]);
    if (word.find(',') != std::string::npos) word = "\"" + word + "\"";
    out += word + "," + format_number(dist.probabilities[k]) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "beta,branch,gamma1,gamma2,gamma_bar,gram_rank,spectrum_size_effective,quantum_min_dim,"
      "classical_min_dim\n";
  for (const auto& r : rows) {
    out += format_roundtrip(r.beta) + "," + to_string(r.branch) + "," + format_roundtrip(r.gamma1) +
           "," + format_roundtrip(r.gamma2) + "," + format_roundtrip(r.gamma_bar) + "," +
           std::to_string(r.gram_rank) + "," + std::to_string(r.spectrum_size_effective) + "," +
           std::to_string(r.quantum_min_dim) + "," + std::to_string(r.classical_min_dim) + "\n";
  }
  return out;
}

}  // namespace qhmm::io
