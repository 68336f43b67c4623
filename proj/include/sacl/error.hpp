#pragma once

#include <stdexcept>
#include <string>

namespace sacl {

/// Base error. `code()` is a stable machine-readable tag (used by the CLI's
/// error JSON); `what()` carries the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct InvalidFieldError : Error {
    explicit InvalidFieldError(const std::string& m) : Error("invalid-field", m) {}
};

struct GridMismatchError : Error {
    explicit GridMismatchError(const std::string& m) : Error("grid-mismatch", m) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& m) : Error("precondition", m) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

struct UnderResolvedKernelError : Error {
    explicit UnderResolvedKernelError(const std::string& m)
        : Error("under-resolved-kernel", m) {}
};

struct GeometryError : Error {
    explicit GeometryError(const std::string& m) : Error("geometry", m) {}
};

struct StabilityError : Error {
    explicit StabilityError(const std::string& m) : Error("stability-guard", m) {}
};

/// Raised when sup|u| exceeds the blow-up bound; carries the time stamp.
class DivergenceError : public Error {
public:
    DivergenceError(double t, const std::string& m) : Error("divergence", m), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Raised by mcf_sphere_radius past the extinction time.
class ExtinctError : public Error {
public:
    ExtinctError(double t_ext, const std::string& m) : Error("extinct", m), extinction_time_(t_ext) {}
    double extinction_time() const noexcept { return extinction_time_; }

private:
    double extinction_time_;
};

struct DegenerateSetError : Error {
    explicit DegenerateSetError(const std::string& m) : Error("degenerate-set", m) {}
};

struct TrajectoryModeError : Error {
    explicit TrajectoryModeError(const std::string& m) : Error("trajectory-mode", m) {}
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& m) : Error("parameter", m) {}
};

/// Configuration problems always name the offending `section.key`.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& m) : Error("config", m), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct SnapshotError : Error {
    SnapshotError(const std::string& code, const std::string& m) : Error(code, m) {}
};

}  // namespace sacl
