#pragma once

#include <stdexcept>
#include <string>

namespace avpgarage {

// Base for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (shape, type, schema tag).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Cell reference outside the grid.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Operation applied to a cell of the wrong kind.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Spec failed validation where a valid one is required.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Occupancy plan references a cell it may not use.
class PlanError : public Error {
 public:
  using Error::Error;
};

// Scene document is not a well-formed "scene/1".
class ImportError : public Error {
 public:
  using Error::Error;
};

// Scenario parameters produce impossible geometry.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

}  // namespace avpgarage
