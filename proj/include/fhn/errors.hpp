#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fhn {

/// Phase angle undefined (element sits at the origin of its phase plane).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Step size fell below the representable minimum; carries the last accepted time.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_good_time)
        : std::runtime_error(what), last_good_time_(last_good_time) {}
    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Fewer section crossings than requested within the time budget.
class SectionTimeout : public std::runtime_error {
public:
    SectionTimeout(const std::string& what, std::size_t found)
        : std::runtime_error(what), found_(found) {}
    std::size_t crossings_found() const noexcept { return found_; }

private:
    std::size_t found_;
};

class NotPeriodicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or command-line input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fhn
