#include "blochobs/error.hpp"

namespace blochobs {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::BranchAmbiguous: return "BranchAmbiguous";
        case ErrorKind::SubspaceMismatch: return "SubspaceMismatch";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::SnapFailed: return "SnapFailed";
        case ErrorKind::Discontinuous: return "Discontinuous";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::HermiticityViolation: return "HermiticityViolation";
        case ErrorKind::TrsInconsistent: return "TrsInconsistent";
        case ErrorKind::GapClosed: return "GapClosed";
        case ErrorKind::CompatViolated: return "CompatViolated";
        case ErrorKind::NoTrs: return "NoTrs";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {
std::string decorate(ErrorKind kind, const std::string& what) {
    return std::string(to_string(kind)) + ": " + what;
}
}  // namespace

Error::Error(ErrorKind kind, const std::string& what, std::optional<Momentum> at)
    : std::runtime_error(decorate(kind, what)), kind_(kind), at_(at) {}

bool Error::refinable() const noexcept {
    switch (kind_) {
        case ErrorKind::RankDeficient:
        case ErrorKind::StepTooLarge:
        case ErrorKind::SnapFailed:
        case ErrorKind::Discontinuous:
        case ErrorKind::SubspaceMismatch:
            return true;
        default:
            return false;
    }
}

}  // namespace blochobs
