#ifndef SYMDEF_ERRORS_HPP
#define SYMDEF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace symdef {

// Kernel error hierarchy. Every precondition violation throws one of these;
// the CLI maps them to exit status 2 (usage/argument) or a failure report.
struct kernel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two values built over different truncation contexts were combined.
struct context_error : kernel_error {
    using kernel_error::kernel_error;
};

// An operation required a (degree-)homogeneous input and did not get one.
struct degree_error : kernel_error {
    using kernel_error::kernel_error;
};

// Bad argument shape: length mismatch, index out of range, wrong arity.
struct argument_error : kernel_error {
    using kernel_error::kernel_error;
};

// An element fell outside the filtered space an operation is defined on.
struct membership_error : kernel_error {
    using kernel_error::kernel_error;
};

// A feature restriction was hit (e.g. non-constant coefficients where only
// constant ones are supported).
struct unsupported_error : kernel_error {
    using kernel_error::kernel_error;
};

// A contract attached to a morphism (filtration compatibility, certified
// Maurer-Cartan input) was violated.
struct contract_error : kernel_error {
    using kernel_error::kernel_error;
};

} // namespace symdef

#endif
