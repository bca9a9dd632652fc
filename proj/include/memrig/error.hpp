#pragma once

#include <stdexcept>
#include <string>

namespace memrig {

/// A value outside its declared domain (voltage range, mux selector, ramp shape, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A cell address outside the 12x7 grid.
class AddressError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A logical message field that does not fit its wire representation.
class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace memrig
