#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ordinal {

enum class ErrorKind {
  invalid_class_count,
  invalid_parameter,
  invalid_label,
  invalid_shape,
  numeric_error,
  insufficient_batch,
  probability_required,
  undefined_metric,
  invalid_spec,
  invalid_combination,
  invalid_data,
  invalid_config,
  parse_error,
  io_error,
  stratification_error,
  config_error,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ordinal
