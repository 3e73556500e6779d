#pragma once

#include <stdexcept>
#include <string>

namespace adl {

// Base class for all pipeline errors. `code()` is a stable machine-parsable
// identifier used by the CLI for single-line error reporting.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define ADL_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                 \
    public:                                                     \
        explicit Name(const std::string& message)               \
            : Error(#Name, message) {}                          \
    }

ADL_DEFINE_ERROR(TooFewBlocks);
ADL_DEFINE_ERROR(DegenerateGeometry);
ADL_DEFINE_ERROR(EmptyStream);
ADL_DEFINE_ERROR(EmptySegment);
ADL_DEFINE_ERROR(TooShort);
ADL_DEFINE_ERROR(CldAtFrameGranularity);
ADL_DEFINE_ERROR(MissingPart);
ADL_DEFINE_ERROR(DimensionMismatch);
ADL_DEFINE_ERROR(NoData);
ADL_DEFINE_ERROR(NumericalUnderflow);
ADL_DEFINE_ERROR(UntrainedActivity);
ADL_DEFINE_ERROR(AllTokensPruned);
ADL_DEFINE_ERROR(RangeMismatch);
ADL_DEFINE_ERROR(InsufficientCorpus);
ADL_DEFINE_ERROR(ParseError);
ADL_DEFINE_ERROR(MissingFile);
ADL_DEFINE_ERROR(InvalidSpec);
ADL_DEFINE_ERROR(InvalidConfig);

#undef ADL_DEFINE_ERROR

}  // namespace adl
