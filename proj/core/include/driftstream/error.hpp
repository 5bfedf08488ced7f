#pragma once

#include <stdexcept>
#include <string>

namespace driftstream {

/// Base class for all errors raised by the engine.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ingest errors.
struct BadMagic : Error {
  using Error::Error;
};
struct TruncatedPacket : Error {
  using Error::Error;
};
struct UnsupportedLinkType : Error {
  using Error::Error;
};
struct SchemaMismatch : Error {
  using Error::Error;
};
struct UnparsableRow : Error {
  UnparsableRow(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_index(row) {}
  std::size_t row_index;
};

// Feature / drift errors.
struct EmptyWindow : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};

// Learner errors.
struct SingleClassTrainingSet : Error {
  using Error::Error;
};
struct ModelFrozen : Error {
  using Error::Error;
};

// Synthesis errors.
struct InsufficientPool : Error {
  InsufficientPool(const std::string& pool, const std::string& cls,
                   std::size_t needed, std::size_t available)
      : Error("pool '" + pool + "' has " + std::to_string(available) + " " +
              cls + " samples, " + std::to_string(needed) + " requested"),
        pool_id(pool), class_name(cls), needed(needed), available(available) {}
  std::string pool_id;
  std::string class_name;
  std::size_t needed;
  std::size_t available;
};
struct InvalidDescriptor : Error {
  using Error::Error;
};

// Evaluation errors.
struct EmptyStream : Error {
  using Error::Error;
};
struct TooFewRuns : Error {
  using Error::Error;
};

}  // namespace driftstream
