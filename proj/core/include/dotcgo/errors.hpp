#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dotcgo {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BumpOutsideOmega : public Error { using Error::Error; };
class PositivityViolated : public Error { using Error::Error; };
class IdenticalData : public Error { using Error::Error; };
class FrameInfeasible : public Error { using Error::Error; };
class ContractionFailure : public Error { using Error::Error; };
class ProjectionLoss : public Error { using Error::Error; };
class DomainViolation : public Error { using Error::Error; };
class SingularMatrix : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

// k hit (or came too close to) a discrete Dirichlet eigenvalue.
class NearSingularSystem : public Error {
public:
    NearSingularSystem(const std::string& what, int column)
        : Error(what), column_(column) {}
    int column() const noexcept { return column_; }
private:
    int column_;
};

class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }
private:
    std::size_t offset_;
};

} // namespace dotcgo
