#pragma once

#include <stdexcept>
#include <string>

namespace trigsim {

// Base class for all library errors. Catch this to map failures to CLI
// exit codes without enumerating every subtype.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value or malformed scenario input.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Structurally invalid topology, or a required path does not exist.
class TopologyError : public Error {
public:
    using Error::Error;
};

// Calibration could not find a usable delay setting.
class CalibrationError : public Error {
public:
    using Error::Error;
};

// Command rejected by the device state machine, or malformed wire frame.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Operation needs more data than the caller supplied.
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace trigsim
