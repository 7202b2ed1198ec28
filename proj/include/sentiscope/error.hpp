#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentiscope {

// Base of every domain error. `code()` is a stable, machine-readable tag that
// the CLI prints and the service maps onto ApiError bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define SENTISCOPE_DEFINE_ERROR(Name, tag)                              \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(tag, message) {} \
  }

SENTISCOPE_DEFINE_ERROR(InvalidArgument, "invalid_argument");
SENTISCOPE_DEFINE_ERROR(IoError, "io_error");
SENTISCOPE_DEFINE_ERROR(EmptyVocabulary, "empty_vocabulary");
SENTISCOPE_DEFINE_ERROR(DimensionMismatch, "dimension_mismatch");
SENTISCOPE_DEFINE_ERROR(InvalidHyperparameter, "invalid_hyperparameter");
SENTISCOPE_DEFINE_ERROR(VersionMismatch, "version_mismatch");
SENTISCOPE_DEFINE_ERROR(CorruptPayload, "corrupt_payload");
SENTISCOPE_DEFINE_ERROR(TooFewPerClass, "too_few_per_class");
SENTISCOPE_DEFINE_ERROR(ZeroFrameTotal, "zero_frame_total");
SENTISCOPE_DEFINE_ERROR(UnknownState, "unknown_state");
SENTISCOPE_DEFINE_ERROR(GeometryError, "geometry_error");
SENTISCOPE_DEFINE_ERROR(InvalidSpec, "invalid_spec");

#undef SENTISCOPE_DEFINE_ERROR

// Malformed CSV row; `row` is 1-based and excludes the header.
class CsvFormatError : public Error {
 public:
  CsvFormatError(std::size_t row, const std::string& reason)
      : Error("csv_format", "row " + std::to_string(row) + ": " + reason), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// GeoJSON schema violation at a given feature index.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t feature_index, const std::string& reason)
      : Error("schema_error", "feature " + std::to_string(feature_index) + ": " + reason),
        feature_index_(feature_index) {}
  std::size_t feature_index() const noexcept { return feature_index_; }

 private:
  std::size_t feature_index_;
};

class InsufficientClassData : public Error {
 public:
  InsufficientClassData(std::string label, std::size_t have, std::size_t need)
      : Error("insufficient_class_data", "class " + label + " has " + std::to_string(have) +
                                             " examples, need " + std::to_string(need)),
        label_(std::move(label)), have_(have), need_(need) {}
  const std::string& label() const noexcept { return label_; }
  std::size_t have() const noexcept { return have_; }
  std::size_t need() const noexcept { return need_; }

 private:
  std::string label_;
  std::size_t have_;
  std::size_t need_;
};

// A cross-validation fold failed; keeps the inner error's code.
class FoldFailure : public Error {
 public:
  FoldFailure(std::size_t fold, const Error& inner)
      : Error(inner.code(), "fold " + std::to_string(fold) + ": " + inner.what()), fold_(fold) {}
  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

}  // namespace sentiscope
