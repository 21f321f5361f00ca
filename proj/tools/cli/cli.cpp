#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "qhmm/qhmm.hpp"

namespace qhmm::cli {

namespace {

using io::format_complex;
using io::format_number;
using io::json;

struct Options {
  std::string format = "table";
  std::string output;
  double tol_eig_dedup = ToleranceConfig{}.eig_dedup;
  double tol_eig_zero = ToleranceConfig{}.eig_zero;
  double tol_rank = ToleranceConfig{}.rank;
  std::uint64_t seed = 1;
  std::size_t brute_length = 0;
  std::size_t verify_length = 6;

  std::string model_path;
  std::string other_path;
  std::string word;
  std::optional<std::size_t> length;
  std::size_t count = 1;
  std::string phases = "zero";
  std::size_t phase_trials = 64;
  double alpha = 0.5;
  double beta = 0.5;
  std::string branch = "quantum";
  std::optional<double> gamma1;
  std::optional<double> gamma2;
  std::string beta_grid = "0.02:0.98:50";

  ToleranceConfig tolerances() const {
    ToleranceConfig tol;
    tol.eig_dedup = tol_eig_dedup;
    tol.eig_zero = tol_eig_zero;
    tol.rank = tol_rank;
    tol.check();
    return tol;
  }
};

// Writes the payload either to --output or to the output stream.
class Sink {
 public:
  Sink(const Options& opts, std::ostream& out) : path_(opts.output), out_(out) {}

  void write(const std::string& text) {
    if (path_.empty()) {
      out_ << text;
      return;
    }
    std::ofstream file(path_);
    if (!file) throw Error("cannot write " + path_);
    file << text;
  }

 private:
  std::string path_;
  std::ostream& out_;
};

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::size_t thread_cap() {
  if (const char* env = std::getenv("QHMM_SPECTRAL_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DomainError("bad number '" + s + "' in grid");
    return v;
  };
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string lo, hi, n;
      std::getline(ss, lo, ':');
      std::getline(ss, hi, ':');
      std::getline(ss, n);
      const double a = number(lo);
      const double b = number(hi);
      const long count = std::stol(n);
      if (count < 1) throw DomainError("grid needs at least one point");
      for (long k = 0; k < count; ++k) {
        values.push_back(count == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
      }
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) values.push_back(number(item));
    }
  } catch (const std::invalid_argument&) {
    throw DomainError("cannot parse grid '" + text + "'");
  } catch (const std::out_of_range&) {
    throw DomainError("cannot parse grid '" + text + "'");
  }
  if (values.empty()) throw DomainError("empty grid");
  return values;
}

PhaseAssignment parse_phases(const Options& opts, const ClassicalHmm& model) {
  const std::string& spec = opts.phases;
  if (spec == "zero") return PhaseAssignment::zero();
  if (spec.rfind("random:", 0) == 0) return PhaseAssignment::random(std::stoull(spec.substr(7)));
  if (spec == "search") return explore_phases(model, opts.phase_trials, opts.seed, opts.tolerances()).phases;
  throw DomainError("unknown phase assignment '" + spec + "' (zero, random:SEED or search)");
}

// Returns false (and reports) when the model is invalid.
bool require_valid(const AnyModel& model, const ToleranceConfig& tol, std::ostream& err) {
  const auto report = validate(model, tol);
  if (report.valid()) return true;
  err << "error: model is invalid\n";
  for (const auto& v : report.violations()) {
    err << "  " << v.name << ": residual " << format_number(v.residual) << " > "
        << format_number(v.tolerance) << "\n";
  }
  return false;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// --------------------------------------------------------------------------
// Subcommands

int cmd_validate(const Options& opts, std::ostream& out) {
  const AnyModel model = io::load_model(opts.model_path);
  const auto report = validate(model, opts.tolerances());
  Sink sink(opts, out);
  if (opts.format == "json") {
    sink.write(dump(io::to_json(report)));
  } else {
    std::ostringstream os;
    os << (report.valid() ? "valid" : "INVALID") << " "
       << (std::holds_alternative<ClassicalHmm>(model) ? "classical" : "quantum")
       << " model, dim " << dim_of(model) << ", alphabet size " << alphabet_of(model).size() << "\n";
    for (const auto& c : report.checks) {
      os << "  " << pad(c.name, 26) << pad(c.passed ? "ok" : "FAIL", 6) << "residual "
         << format_number(c.residual) << " (tol " << format_number(c.tolerance) << ")\n";
    }
    sink.write(os.str());
  }
  return report.valid() ? kSuccess : kDomainFailure;
}

int cmd_eval(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel model = io::load_model(opts.model_path);
  if (!require_valid(model, opts.tolerances(), err)) return kDomainFailure;
  const Alphabet& alphabet = alphabet_of(model);
  Sink sink(opts, out);
  if (!opts.word.empty() || !opts.length) {
    const Word w = parse_word(alphabet, opts.word);
    const double p = word_probability(model, w);
    if (opts.format == "json") {
      sink.write(dump({{"word", format_word(alphabet, w)}, {"probability", io::round12(p)}}));
    } else if (opts.format == "csv") {
      sink.write("word,probability\n" + format_word(alphabet, w) + "," + format_number(p) + "\n");
    } else {
      sink.write("P(" + format_word(alphabet, w) + ") = " + format_number(p) + "\n");
    }
    return kSuccess;
  }
  const auto dist = enumerate_distribution(model, *opts.length);
  if (opts.format == "json") {
    sink.write(dump(io::to_json(dist, alphabet)));
  } else if (opts.format == "csv") {
    sink.write(io::distribution_csv(dist, alphabet));
  } else {
    std::ostringstream os;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      os << pad(format_word(alphabet, dist.words[k]), std::max<std::size_t>(8, *opts.length + 2))
         << format_number(dist.probabilities[k]) << "\n";
    }
    os << "total " << format_number(dist.total) << "\n";
    sink.write(os.str());
  }
  return kSuccess;
}

int cmd_sample(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel model = io::load_model(opts.model_path);
  if (!require_valid(model, opts.tolerances(), err)) return kDomainFailure;
  if (!opts.length) throw DomainError("sample needs --length");
  const auto words = sample_many(model, *opts.length, opts.count, opts.seed);
  const Alphabet& alphabet = alphabet_of(model);
  std::ostringstream os;
  if (opts.format == "json") {
    json arr = json::array();
    for (const auto& w : words) arr.push_back(format_word(alphabet, w));
    os << dump({{"length", *opts.length}, {"seed", opts.seed}, {"words", arr}});
  } else {
    if (opts.format == "csv") os << "word\n";
    for (const auto& w : words) os << format_word(alphabet, w) << "\n";
  }
  Sink(opts, out).write(os.str());
  return kSuccess;
}

void render_spectrum_table(std::ostream& os, const SpectrumReport& r, const TransferOperator& op) {
  os << "transfer operator: " << to_string(op.kind) << " " << op.size() << "x" << op.size()
     << " (self pair)\n";
  os << "spectral radius:   " << format_number(r.spectral_radius) << "\n";
  os << "raw |Lambda|:      " << r.raw_count() << "\n";
  os << "effective |Lambda|: " << r.effective_count << "\n";
  os << "diagonalizable:    " << (r.diagonalizable ? "yes" : "NO") << " (eigenvector condition "
     << format_number(r.condition_estimate) << ")\n";
  os << "moment self-test:  residual " << format_number(r.self_test_residual) << " up to L="
     << r.self_test_max_length << "\n\n";
  os << pad("#", 4) << pad("lambda", 36) << pad("|lambda|", 16) << pad("mult", 6)
     << pad("alpha", 36) << "effective\n";
  std::size_t idx = 1;
  for (const auto& c : r.distinct_nonzero) {
    const bool effective = std::abs(c.alpha) > r.tolerances_used.eig_zero;
    os << pad(std::to_string(idx++), 4) << pad(format_complex(c.value), 36)
       << pad(format_number(std::abs(c.value)), 16) << pad(std::to_string(c.multiplicity), 6)
       << pad(format_complex(c.alpha), 36) << (effective ? "yes" : "no") << "\n";
  }
  if (r.zero_cluster) {
    os << pad("0", 4) << pad("0", 36) << pad("0", 16) << pad(std::to_string(r.zero_cluster->multiplicity), 6)
       << pad(format_complex(r.zero_cluster->alpha), 36) << "(zero)\n";
  }
}

int cmd_spectrum(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel model = io::load_model(opts.model_path);
  const ToleranceConfig tol = opts.tolerances();
  if (!require_valid(model, tol, err)) return kDomainFailure;
  const TransferOperator op = build_self_transfer(model);
  const SpectrumReport report = spectrum(op, tol);
  if (!report.reliable()) {
    err << "WARNING: transfer operator is defective or failed its moment self-test; "
           "spectral invariants are unreliable\n";
  }
  if (opts.format == "json") {
    Sink(opts, out).write(dump(io::to_json(report)));
  } else {
    std::ostringstream os;
    render_spectrum_table(os, report, op);
    Sink(opts, out).write(os.str());
  }
  return report.reliable() ? kSuccess : kDomainFailure;
}

int cmd_transfer(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel a = io::load_model(opts.model_path);
  const AnyModel b = opts.other_path.empty() ? a : io::load_model(opts.other_path);
  const ToleranceConfig tol = opts.tolerances();
  if (!require_valid(a, tol, err) || !require_valid(b, tol, err)) return kDomainFailure;
  TransferOperator op;
  const auto* ca = std::get_if<ClassicalHmm>(&a);
  const auto* cb = std::get_if<ClassicalHmm>(&b);
  if (ca && cb) {
    op = build_classical_transfer(*ca, *cb);
  } else {
    const Qhmm qa = ca ? sio_embed(*ca) : std::get<Qhmm>(a);
    const Qhmm qb = cb ? sio_embed(*cb) : std::get<Qhmm>(b);
    op = build_quantum_transfer(qa, qb);
  }
  Sink(opts, out).write(dump(io::to_json(op)));
  return kSuccess;
}

int cmd_bounds(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel model = io::load_model(opts.model_path);
  const ToleranceConfig tol = opts.tolerances();
  if (!require_valid(model, tol, err)) return kDomainFailure;
  const SpectrumReport report = spectrum(build_self_transfer(model), tol);
  if (!report.reliable()) {
    err << "WARNING: transfer operator is defective; bounds are unreliable\n";
  }
  const BoundReport b = complexity_bounds(report);
  if (opts.format == "json") {
    Sink(opts, out).write(dump(io::to_json(b)));
  } else if (opts.format == "csv") {
    Sink(opts, out).write(
        "spectrum_size,raw_spectrum_size,quantum_min_dim,classical_min_dim,c_q_lower_bits,c_c_lower_bits\n" +
        std::to_string(b.spectrum_size) + "," + std::to_string(b.raw_spectrum_size) + "," +
        std::to_string(b.quantum_min_dim) + "," + std::to_string(b.classical_min_dim) + "," +
        format_number(b.c_q_lower_bits) + "," + format_number(b.c_c_lower_bits) + "\n");
  } else {
    std::ostringstream os;
    os << "effective |Lambda|:  " << b.spectrum_size << "\n"
       << "raw |Lambda|:        " << b.raw_spectrum_size << "\n"
       << "quantum min dim:     " << b.quantum_min_dim << "  (c_Q >= " << format_number(b.c_q_lower_bits)
       << " bits)\n"
       << "classical min dim:   " << b.classical_min_dim << "  (c_C >= " << format_number(b.c_c_lower_bits)
       << " bits)\n"
       << "from raw |Lambda|:   quantum " << b.raw_quantum_min_dim << ", classical "
       << b.raw_classical_min_dim << "\n";
    Sink(opts, out).write(os.str());
  }
  return report.reliable() ? kSuccess : kDomainFailure;
}

int cmd_compare(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel a = io::load_model(opts.model_path);
  const AnyModel b = io::load_model(opts.other_path);
  EquivalenceOptions eq;
  eq.tol = opts.tolerances();
  if (!require_valid(a, eq.tol, err) || !require_valid(b, eq.tol, err)) return kDomainFailure;
  if (opts.brute_length > 0) eq.brute_force_length = opts.brute_length;
  const EquivalenceVerdict v = check_equivalence(a, b, eq);
  if (opts.format == "json") {
    Sink(opts, out).write(dump(io::to_json(v)));
  } else {
    std::ostringstream os;
    os << "verdict: " << to_string(v.outcome) << " (" << v.reason << ")\n"
       << "spectra match:      " << (v.spectra_match ? "yes" : "no") << "  (max gap "
       << format_number(v.max_eigenvalue_gap) << ")\n"
       << "coefficients match: " << (v.coefficients_match ? "yes" : "no") << "  (max gap "
       << format_number(v.max_coefficient_gap) << ")\n";
    if (!v.moment_checks.empty()) {
      os << "\n" << pad("L", 6) << pad("moment A", 20) << pad("moment B", 20) << "residual\n";
      for (const auto& m : v.moment_checks) {
        os << pad(std::to_string(m.length), 6) << pad(format_number(m.lhs), 20)
           << pad(format_number(m.rhs), 20) << format_number(m.residual) << "\n";
      }
    }
    if (v.brute_force_match) {
      os << "\nbrute force up to L=" << v.brute_force_max_length << ": "
         << (*v.brute_force_match ? "match" : "MISMATCH") << " (max gap "
         << format_number(v.brute_force_max_gap) << ")\n";
    }
    if (v.consistent()) os << "\nnote: consistent means every necessary condition holds; it does not prove equivalence\n";
    Sink(opts, out).write(os.str());
  }
  return v.consistent() ? kSuccess : kDomainFailure;
}

int cmd_compress(const Options& opts, std::ostream& out, std::ostream& err) {
  const AnyModel loaded = io::load_model(opts.model_path);
  const auto* source = std::get_if<ClassicalHmm>(&loaded);
  if (!source) throw DomainError("compress expects a classical model");
  const ToleranceConfig tol = opts.tolerances();
  if (!require_valid(loaded, tol, err)) return kDomainFailure;
  const CompressedQhmm c = compress(*source, parse_phases(opts, *source), tol, opts.verify_length);
  for (const auto& w : c.warnings) err << "warning: " << w << "\n";
  err << "compressed " << source->dim() << " -> " << c.dim() << " dimensions";
  if (c.verified_length > 0) {
    err << "; max word deviation up to L=" << c.verified_length << ": "
        << format_number(c.max_word_deviation);
  }
  err << "\n";
  Sink(opts, out).write(dump(io::to_json(c)));
  const bool verified = c.verified_length == 0 || c.max_word_deviation <= tol.prob;
  const bool valid = validate_quantum(c.model, tol).valid();
  return verified && valid ? kSuccess : kDomainFailure;
}

int cmd_example(const Options& opts, std::ostream& out) {
  ClassicalHmm model = (opts.gamma1 || opts.gamma2)
                           ? example_model(opts.alpha, opts.beta, opts.gamma1.value_or(0.0),
                                           opts.gamma2.value_or(0.0))
                           : example_model_family(opts.alpha, opts.beta, parse_branch(opts.branch));
  Sink(opts, out).write(dump(io::to_json(model)));
  return kSuccess;
}

int cmd_sweep(const Options& opts, std::ostream& out) {
  const auto rows = sweep_reduction_curves(opts.alpha, parse_grid(opts.beta_grid), opts.tolerances(),
                                           thread_cap());
  if (opts.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"beta", r.beta},
                     {"branch", to_string(r.branch)},
                     {"gamma1", r.gamma1},
                     {"gamma2", r.gamma2},
                     {"gamma_bar", r.gamma_bar},
                     {"gram_rank", r.gram_rank},
                     {"spectrum_size_effective", r.spectrum_size_effective},
                     {"quantum_min_dim", r.quantum_min_dim},
                     {"classical_min_dim", r.classical_min_dim}});
    }
    Sink(opts, out).write(dump(arr));
  } else {
    Sink(opts, out).write(io::sweep_csv(rows));
  }
  return kSuccess;
}

void add_tolerance_flags(CLI::App* sub, Options& o) {
  sub->add_option("--tol-eig-dedup", o.tol_eig_dedup, "eigenvalue merge distance, relative to spectral radius");
  sub->add_option("--tol-eig-zero", o.tol_eig_zero, "zero-eigenvalue threshold, relative to spectral radius");
  sub->add_option("--tol-rank", o.tol_rank, "relative singular-value cut for numerical rank");
}

void add_format_flag(CLI::App* sub, Options& o, std::vector<std::string> allowed) {
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember(std::move(allowed)));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum and classical hidden Markov models: spectra, memory bounds, compression"};
  app.name("qhmm");
  app.require_subcommand(1);
  Options o;

  auto* validate_cmd = app.add_subcommand("validate", "check model invariants");
  validate_cmd->add_option("model", o.model_path, "model JSON file")->required();
  add_format_flag(validate_cmd, o, {"json", "table"});
  validate_cmd->add_option("--output", o.output, "write output to a file");

  auto* eval_cmd = app.add_subcommand("eval", "word probabilities");
  eval_cmd->add_option("model", o.model_path, "model JSON file")->required();
  auto* word_opt = eval_cmd->add_option("--word", o.word, "single word, e.g. 0110 or a,b,a");
  eval_cmd->add_option("--length", o.length, "enumerate all words of this length")->excludes(word_opt);
  add_format_flag(eval_cmd, o, {"json", "csv", "table"});
  eval_cmd->add_option("--output", o.output, "write output to a file");

  auto* sample_cmd = app.add_subcommand("sample", "draw words from a model");
  sample_cmd->add_option("model", o.model_path, "model JSON file")->required();
  sample_cmd->add_option("--length", o.length, "word length")->required();
  sample_cmd->add_option("--count", o.count, "number of words");
  sample_cmd->add_option("--seed", o.seed, "random seed");
  add_format_flag(sample_cmd, o, {"json", "csv", "table"});
  sample_cmd->add_option("--output", o.output, "write output to a file");

  auto* spectrum_cmd = app.add_subcommand("spectrum", "spectral invariants of the self-pair transfer operator");
  spectrum_cmd->add_option("model", o.model_path, "model JSON file")->required();
  add_tolerance_flags(spectrum_cmd, o);
  add_format_flag(spectrum_cmd, o, {"json", "table"});
  spectrum_cmd->add_option("--output", o.output, "write output to a file");

  auto* transfer_cmd = app.add_subcommand("transfer", "export a transfer operator as JSON");
  transfer_cmd->add_option("model", o.model_path, "model JSON file")->required();
  transfer_cmd->add_option("other", o.other_path, "second model (defaults to the first)");
  transfer_cmd->add_option("--output", o.output, "write output to a file");

  auto* bounds_cmd = app.add_subcommand("bounds", "memory lower bounds from the spectrum size");
  bounds_cmd->add_option("model", o.model_path, "model JSON file")->required();
  add_tolerance_flags(bounds_cmd, o);
  add_format_flag(bounds_cmd, o, {"json", "csv", "table"});
  bounds_cmd->add_option("--output", o.output, "write output to a file");

  auto* compare_cmd = app.add_subcommand("compare", "test two models for process equivalence");
  compare_cmd->add_option("model_a", o.model_path, "first model JSON file")->required();
  compare_cmd->add_option("model_b", o.other_path, "second model JSON file")->required();
  compare_cmd->add_option("--brute-L", o.brute_length, "also compare word distributions up to this length");
  add_tolerance_flags(compare_cmd, o);
  add_format_flag(compare_cmd, o, {"json", "table"});
  compare_cmd->add_option("--output", o.output, "write output to a file");

  auto* compress_cmd = app.add_subcommand("compress", "compress a classical model into a quantum one");
  compress_cmd->add_option("model", o.model_path, "classical model JSON file")->required();
  compress_cmd->add_option("--phases", o.phases, "zero, random:SEED or search");
  compress_cmd->add_option("--phase-trials", o.phase_trials, "random assignments tried by --phases search");
  compress_cmd->add_option("--seed", o.seed, "seed for --phases search");
  compress_cmd->add_option("--verify-L", o.verify_length, "compare word probabilities up to this length");
  add_tolerance_flags(compress_cmd, o);
  compress_cmd->add_option("--output", o.output, "write the compressed model to a file");

  auto* example_cmd = app.add_subcommand("example", "three-state example model");
  example_cmd->add_option("--alpha", o.alpha, "alpha in (0,1)");
  example_cmd->add_option("--beta", o.beta, "beta in (0,1)");
  auto* branch_opt = example_cmd->add_option("--branch", o.branch, "quantum or classical reduction line");
  auto* g1 = example_cmd->add_option("--gamma1", o.gamma1, "explicit gamma1 (off the reduction lines)");
  auto* g2 = example_cmd->add_option("--gamma2", o.gamma2, "explicit gamma2 (off the reduction lines)");
  g1->excludes(branch_opt);
  g2->excludes(branch_opt);
  example_cmd->add_option("--output", o.output, "write the model to a file");

  auto* sweep_cmd = app.add_subcommand("sweep", "reduction curves of the example family");
  sweep_cmd->add_option("--alpha", o.alpha, "alpha in (0,1)");
  sweep_cmd->add_option("--beta-grid", o.beta_grid, "comma list or lo:hi:count");
  add_tolerance_flags(sweep_cmd, o);
  add_format_flag(sweep_cmd, o, {"json", "csv"});
  sweep_cmd->add_option("--output", o.output, "write output to a file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*validate_cmd) return cmd_validate(o, out);
    if (*eval_cmd) return cmd_eval(o, out, err);
    if (*sample_cmd) return cmd_sample(o, out, err);
    if (*spectrum_cmd) return cmd_spectrum(o, out, err);
    if (*transfer_cmd) return cmd_transfer(o, out, err);
    if (*bounds_cmd) return cmd_bounds(o, out, err);
    if (*compare_cmd) return cmd_compare(o, out, err);
    if (*compress_cmd) return cmd_compress(o, out, err);
    if (*example_cmd) return cmd_example(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
  return kUsageError;
}

}  // namespace qhmm::cli
