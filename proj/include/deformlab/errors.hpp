#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deformlab {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class division_by_zero : public error {
public:
    division_by_zero() : error("division by zero") {}
    explicit division_by_zero(const std::string& what) : error(what) {}
};

class dimension_mismatch : public error {
public:
    using error::error;
};

class order_bound_exceeded : public error {
public:
    using error::error;
};

class not_symplectic : public error {
public:
    using error::error;
};

class not_a_symplectic_reflection : public error {
public:
    using error::error;
};

class not_a_cocycle : public error {
public:
    using error::error;
};

class size_budget_exceeded : public error {
public:
    using error::error;
};

class specialization_failed : public error {
public:
    using error::error;
};

class not_spherical : public error {
public:
    using error::error;
};

class c_not_class_invariant : public error {
public:
    using error::error;
};

// A violated theorem, i.e. a bug in this library rather than bad input.
class internal_error : public error {
public:
    using error::error;
};

} // namespace deformlab
