// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace gert {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (GeoJSON, grids, manifests, configs).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Invalid geometry that the pipeline refuses to repair.
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

/// I/O failure; the message names the offending file.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Network fetch failure after retries; carries the last status.
class FetchError : public Error {
public:
    explicit FetchError(const std::string& msg) : Error(msg) {}
};

} // namespace gert
