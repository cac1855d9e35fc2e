#pragma once

#include <stdexcept>
#include <string>

namespace spotkick {

// Base of every library error. Three categories below drive the CLI exit
// codes: DataError -> 2, NumericError -> 3, ArgumentError -> 4.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class ArgumentError : public Error {
public:
  using Error::Error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

class MalformedRow : public DataError {
public:
  MalformedRow(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class CoordinateOutOfRange : public DataError {
public:
  using DataError::DataError;
};

class DuplicateKickId : public DataError {
public:
  using DataError::DataError;
};

class InvalidSpec : public DataError {
public:
  using DataError::DataError;
};

class EmptyDataset : public DataError {
public:
  using DataError::DataError;
};

class MissingData : public DataError {
public:
  using DataError::DataError;
};

class MissingActionType : public DataError {
public:
  using DataError::DataError;
};

class EmptyCluster : public DataError {
public:
  using DataError::DataError;
};

class AllZeroMatrix : public DataError {
public:
  using DataError::DataError;
};

class DimensionMismatch : public ArgumentError {
public:
  using ArgumentError::ArgumentError;
};

class InvalidRank : public ArgumentError {
public:
  using ArgumentError::ArgumentError;
};

class InvalidK : public ArgumentError {
public:
  using ArgumentError::ArgumentError;
};

class InvalidRange : public ArgumentError {
public:
  using ArgumentError::ArgumentError;
};

class SolverFailure : public NumericError {
public:
  using NumericError::NumericError;
};

}  // namespace spotkick
