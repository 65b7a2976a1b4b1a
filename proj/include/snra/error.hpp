#pragma once

#include <stdexcept>
#include <string>

namespace snra {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector / matrix sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Crossbar or FSM driven with an illegal signal combination.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Numeric argument outside the function's domain (NaN, inf, bad ratio).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Cell / element index outside its container.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Topology string or layer list that does not describe a network.
class TopologyError : public Error {
 public:
  using Error::Error;
};

// Problem size beyond what brute-force enumeration accepts.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable file (model, VCD, reference tables).
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace snra
