#pragma once

#include <string>

#include "wq/measures.hpp"

namespace wq::measures {

/// JSON forms:
///   {"kind":"finite1d","n":...,"p":[...]}
///   {"kind":"mixture","lambda":...}
///   {"kind":"finite2d","nx":...,"ny":...,"p":[[...]]}
std::string to_json(const Measure1D& m);
std::string to_json(const FiniteMeasure2D& m);

/// Parsed measure; throws std::invalid_argument on malformed input.
Measure1D measure1d_from_json(const std::string& text);
FiniteMeasure2D measure2d_from_json(const std::string& text);

Measure1D load_measure1d(const std::string& path);
FiniteMeasure2D load_measure2d(const std::string& path);
void save_measure(const Measure1D& m, const std::string& path);
void save_measure(const FiniteMeasure2D& m, const std::string& path);

/// SampleBatch CSV: `# seed=<seed>` comment line, then one coordinate tuple
/// per row with 17 significant digits.
std::string to_csv(const SampleBatch& batch);
std::string to_csv(const SampleBatch2D& batch);
SampleBatch sample_batch_from_csv(const std::string& text);
SampleBatch load_sample_batch(const std::string& path);
void save_sample_batch(const SampleBatch& batch, const std::string& path);

/// Number formatting used across all emitted files: 17 significant digits,
/// '.' decimal separator.
std::string format_double(double v);

}  // namespace wq::measures
