#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qhmm/compress.hpp"
#include "qhmm/model.hpp"
#include "qhmm/process.hpp"
#include "qhmm/spectral.hpp"
#include "qhmm/transfer.hpp"

namespace qhmm::io {

using nlohmann::json;

// Model files --------------------------------------------------------------
//
//   { "type": "classical", "alphabet": ["0","1"], "dim": m,
//     "transition": { "0": [[...], ...], "1": ... }, "initial": [π...] }
//   { "type": "quantum", "alphabet": [...], "dim": d,
//     "kraus": { "0": [ [[[re,im], ...], ...], ... ] }, "initial": [[[re,im], ...], ...] }
//
// Matrices are arrays of rows. Complex entries are [re, im]; plain numbers
// are accepted as real entries. Model files keep full double precision.

json to_json(const ClassicalHmm& model);
json to_json(const Qhmm& model);
json to_json(const AnyModel& model);

/// Throws ParseError on schema violations and DimensionError on shape
/// mismatches.
AnyModel model_from_json(const json& doc);
AnyModel load_model(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& doc);
json parse_json_text(const std::string& text);

json complex_to_json(Complex z);
Complex complex_from_json(const json& value);
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& value);

// Reports -------------------------------------------------------------------
//
// Report numbers are rounded to 12 significant digits so that repeated runs
// produce byte-identical output.

double round12(double value);
/// 12 significant digits, '.' decimal separator, no locale dependence.
std::string format_number(double value);
std::string format_complex(Complex z);
/// Shortest representation that parses back to the same double.
std::string format_roundtrip(double value);

json to_json(const ValidationReport& report);
json to_json(const SpectrumReport& report);
json to_json(const BoundReport& report);
json to_json(const EquivalenceVerdict& verdict);
json to_json(const TransferOperator& op);
TransferOperator transfer_from_json(const json& doc);
json to_json(const WordDistribution& dist, const Alphabet& alphabet);
/// Standard model schema plus a "provenance" block.
json to_json(const CompressedQhmm& compressed);
json to_json(const ToleranceConfig& tol);

/// CSV with header "word,probability".
std::string distribution_csv(const WordDistribution& dist, const Alphabet& alphabet);

/// CSV with header
/// "beta,branch,gamma1,gamma2,gamma_bar,gram_rank,spectrum_size_effective,quantum_min_dim,classical_min_dim".
/// β and the γ weights are written round-trip exact so that their sum can be
/// checked at full precision.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace qhmm::io
