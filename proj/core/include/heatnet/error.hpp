#pragma once

#include <stdexcept>
#include <string>

namespace heatnet {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape/rank disagreement between tensors.
struct DimensionError : Error {
  using Error::Error;
};

// Masked softmax over a neighborhood with no surviving entry.
struct EmptyNeighborhoodError : Error {
  using Error::Error;
};

// Inconsistent layer/model configuration (widths, unknown node type, raster size).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input file; message carries the line number where known.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid file that violates the scene schema (duplicate rows, bad tick).
struct SchemaError : Error {
  using Error::Error;
};

// Binary file with a bad magic/size field.
struct FormatError : Error {
  using Error::Error;
};

// Missing or malformed raster sidecar.
struct MetadataError : Error {
  using Error::Error;
};

// Agent history shorter than the requested traceback horizon.
struct TruncationError : Error {
  using Error::Error;
};

// Agent matched by zero or several type masks.
struct MaskError : Error {
  using Error::Error;
};

// Metric requested on an empty target set.
struct MetricError : Error {
  using Error::Error;
};

// Horizon step outside the stored prediction horizon.
struct RangeError : Error {
  using Error::Error;
};

// Parameter file does not match the requested variant/widths.
struct CompatibilityError : Error {
  using Error::Error;
};

// Filesystem failure.
struct IoError : Error {
  using Error::Error;
};

// Training diverged; carries the epoch index.
struct TrainingError : Error {
  TrainingError(const std::string& msg, int epoch_index)
      : Error(msg), epoch(epoch_index) {}
  int epoch;
};

}  // namespace heatnet
