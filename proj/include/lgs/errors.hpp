#pragma once

#include <stdexcept>
#include <string>

namespace lgs {

// Thrown when an input matrix is rank-deficient beyond recovery.
struct singular_basis_error : std::runtime_error {
    explicit singular_basis_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an enumeration exceeds its visited-node budget.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative numerical procedure fails to converge.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lgs
