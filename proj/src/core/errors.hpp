#pragma once

#include <stdexcept>
#include <string>

namespace hvar {

/// Invalid arguments, violated preconditions, malformed configs.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Kernel evaluated at the group identity (or a zero-distance node pair).
class SingularityError : public UsageError {
public:
    explicit SingularityError(const std::string& what) : UsageError(what) {}
};

/// Iterative solver failed to reach its tolerance within the iteration cap.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Configured resource cap exceeded (e.g. grid node count).
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem problems while reading configs or writing outputs.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hvar
