#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "blochobs/types.hpp"

namespace blochobs {

enum class ErrorKind {
    NotHermitian,
    NoConvergence,
    RankDeficient,
    NotUnitary,
    BranchAmbiguous,
    SubspaceMismatch,
    StepTooLarge,
    SnapFailed,
    Discontinuous,
    ParseError,
    HermiticityViolation,
    TrsInconsistent,
    GapClosed,
    CompatViolated,
    NoTrs,
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library error. Carries the failing momentum when one is known.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<Momentum> at = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    const std::optional<Momentum>& momentum() const noexcept { return at_; }

    /// True for failures that a finer discretization can cure.
    bool refinable() const noexcept;

private:
    ErrorKind kind_;
    std::optional<Momentum> at_;
};

}  // namespace blochobs
