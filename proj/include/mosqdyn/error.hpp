#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mosqdyn {

enum class Errc {
  NonFinite,
  NonPositiveRate,
  NegativeDeath,
  DomainError,
  RegimeError,
  NotAFixedPoint,
  NotClaimedInvariant,
  BranchError,
  CertificateFailure,
  PreconditionViolation,
};

constexpr std::string_view to_string(Errc c) {
  switch (c) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::NegativeDeath: return "NegativeDeath";
    case Errc::DomainError: return "DomainError";
    case Errc::RegimeError: return "RegimeError";
    case Errc::NotAFixedPoint: return "NotAFixedPoint";
    case Errc::NotClaimedInvariant: return "NotClaimedInvariant";
    case Errc::BranchError: return "BranchError";
    case Errc::CertificateFailure: return "CertificateFailure";
    case Errc::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

/// Library error. `field()` names the offending parameter when there is one
/// (e.g. "alpha"), so front ends can point at the right input.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::string field = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        field_(std::move(field)) {}

  Errc code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  Errc code_;
  std::string field_;
};

}  // namespace mosqdyn
