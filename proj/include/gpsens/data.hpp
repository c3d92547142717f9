#pragma once

#include <cstdint>
#include <string>

#include "gpsens/types.hpp"

namespace gpsens {

enum class CsvFormat { Generic, MaunaLoa };
std::string csv_format_name(CsvFormat format);
CsvFormat parse_csv_format(const std::string& name);

struct LoadedData {
  Dataset data;
  std::size_t rows = 0;     // data rows seen
  std::size_t dropped = 0;  // rows removed as missing values
};

// Generic: a header row, then D input columns and one output column.
// Mauna Loa: the monthly in-situ layout; see docs/formats.md.
LoadedData parse_csv(const std::string& text, CsvFormat format);
LoadedData load_csv(const std::string& path, CsvFormat format);

// Rows whose first input lies in [lo, hi).
Dataset filter_inputs(const Dataset& data, double lo, double hi);

enum class PreprocessMode { None, Log, Standardize, LogStandardize };
std::string preprocess_mode_name(PreprocessMode mode);
PreprocessMode parse_preprocess_mode(const std::string& name);

// y -> ((log) y - shift) / scale
struct Transform {
  PreprocessMode mode = PreprocessMode::None;
  double shift = 0.0;
  double scale = 1.0;

  bool uses_log() const { return mode == PreprocessMode::Log || mode == PreprocessMode::LogStandardize; }
  double apply(double y) const;
  double invert(double z) const;
  Vector apply(const Vector& y) const;
  Vector invert(const Vector& z) const;
};

struct Preprocessed {
  Dataset data;
  Transform transform;
};

// Standardizing uses the sample standard deviation (N - 1 denominator).
Preprocessed preprocess(const Dataset& data, PreprocessMode mode);

// 25 inputs uniform on [0, 5] followed by 10 uniform on [1.9, 2.1];
// y = x^2 / 2 + cos(pi x) + e with e ~ N(0, 0.01).
Dataset generate_synthetic(std::uint64_t seed);

}  // namespace gpsens
