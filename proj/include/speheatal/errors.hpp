#ifndef SPEHEATAL_ERRORS_HPP
#define SPEHEATAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace speheatal {

struct EmptyMaskError : std::runtime_error {
    explicit EmptyMaskError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateMaskError : std::runtime_error {
    explicit DegenerateMaskError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatchError : std::runtime_error {
    explicit DimensionMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewPointsError : std::runtime_error {
    explicit TooFewPointsError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidKError : std::runtime_error {
    explicit InvalidKError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateAffinityError : std::runtime_error {
    explicit DegenerateAffinityError(const std::string& what) : std::runtime_error(what) {}
};

struct BasisError : std::runtime_error {
    explicit BasisError(const std::string& what) : std::runtime_error(what) {}
};

struct SameOwnerError : std::runtime_error {
    explicit SameOwnerError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyPairingError : std::runtime_error {
    explicit EmptyPairingError(const std::string& what) : std::runtime_error(what) {}
};

struct ProviderError : std::runtime_error {
    explicit ProviderError(const std::string& what) : std::runtime_error(what) {}
};

struct PlacementError : std::runtime_error {
    explicit PlacementError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace speheatal

#endif
