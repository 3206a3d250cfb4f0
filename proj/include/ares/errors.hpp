#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ares {

/// Root of every error raised by the pipeline. CLI exit codes are derived
/// from the concrete subclass (see exit_code()).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

// Ingestion and input validation (exit code 3).
class InputError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
    explicit ParseError(const std::string& what) : InputError(what), line_(0) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public InputError {
public:
    ValidationError(std::size_t line, std::string rule, const std::string& detail)
        : InputError("line " + std::to_string(line) + ": " + rule + ": " + detail),
          line_(line), rule_(std::move(rule)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& rule() const noexcept { return rule_; }

private:
    std::size_t line_;
    std::string rule_;
};

class GapError : public InputError {
public:
    GapError(std::string region, std::string missing_week)
        : InputError("gap in region " + region + ": missing week " + missing_week),
          region_(std::move(region)), missing_week_(std::move(missing_week)) {}
    const std::string& region() const noexcept { return region_; }
    const std::string& missing_week() const noexcept { return missing_week_; }

private:
    std::string region_;
    std::string missing_week_;
};

class CoverageError : public InputError {
public:
    explicit CoverageError(std::vector<std::string> holes)
        : InputError(describe(holes)), holes_(std::move(holes)) {}
    const std::vector<std::string>& holes() const noexcept { return holes_; }

private:
    static std::string describe(const std::vector<std::string>& holes) {
        std::string msg = "coverage holes:";
        for (const auto& h : holes) msg += " " + h;
        return msg;
    }
    std::vector<std::string> holes_;
};

class MissingLagError : public InputError {
public:
    MissingLagError(const std::string& first_feasible, const std::string& what)
        : InputError(what + " (first feasible week " + first_feasible + ")"),
          first_feasible_(first_feasible) {}
    const std::string& first_feasible_week() const noexcept { return first_feasible_; }

private:
    std::string first_feasible_;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class KernelError : public Error {
public:
    using Error::Error;
};

class CvError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(double violation, std::size_t iterations)
        : Error("SMO did not converge after " + std::to_string(iterations) +
                " iterations (KKT violation " + std::to_string(violation) + ")"),
          violation_(violation), iterations_(iterations) {}
    double violation() const noexcept { return violation_; }
    std::size_t iterations() const noexcept { return iterations_; }
    int exit_code() const noexcept override { return 4; }

private:
    double violation_;
    std::size_t iterations_;
};

class IoError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 5; }
};

}  // namespace ares
