#include "ordinal/error.hpp"

namespace ordinal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_class_count: return "invalid-class-count";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::invalid_label: return "invalid-label";
    case ErrorKind::invalid_shape: return "invalid-shape";
    case ErrorKind::numeric_error: return "numeric-error";
    case ErrorKind::insufficient_batch: return "insufficient-batch";
    case ErrorKind::probability_required: return "probability-required";
    case ErrorKind::undefined_metric: return "undefined-metric";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::invalid_combination: return "invalid-combination";
    case ErrorKind::invalid_data: return "invalid-data";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::stratification_error: return "stratification-error";
    case ErrorKind::config_error: return "config-error";
  }
  return "unknown-error";
}

}  // namespace ordinal
