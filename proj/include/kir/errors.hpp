#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace kir {

// Base for all library errors. `kind()` is a stable machine-readable tag
// used by the CLI to emit structured error reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define KIR_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& message)                     \
            : Error(#Name, message) {}                                \
    }

KIR_DEFINE_ERROR(DimensionMismatch);
KIR_DEFINE_ERROR(InvalidRotation);
KIR_DEFINE_ERROR(DegenerateSample);
KIR_DEFINE_ERROR(EmptySample);
KIR_DEFINE_ERROR(InsufficientPoints);
KIR_DEFINE_ERROR(DegenerateVariance);
KIR_DEFINE_ERROR(NotPositiveDefinite);
KIR_DEFINE_ERROR(GuardExceeded);
KIR_DEFINE_ERROR(NotScalar);
KIR_DEFINE_ERROR(ParseError);
KIR_DEFINE_ERROR(MissingValue);
KIR_DEFINE_ERROR(ConstantColumn);
KIR_DEFINE_ERROR(DegeneratePopulationVariance);
KIR_DEFINE_ERROR(InvalidConfig);

#undef KIR_DEFINE_ERROR

}  // namespace kir
