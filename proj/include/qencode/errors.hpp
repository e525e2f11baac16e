#pragma once

#include <stdexcept>
#include <string>

namespace qencode {

// Base class for all simulator errors.
struct SimError : std::runtime_error {
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

#define QENCODE_DEFINE_ERROR(Name)                                        \
    struct Name : SimError {                                              \
        explicit Name(const std::string& what) : SimError(#Name ": " + what) {} \
    }

QENCODE_DEFINE_ERROR(OverlappingChannels);
QENCODE_DEFINE_ERROR(TruncationExceeded);
QENCODE_DEFINE_ERROR(UnknownMode);
QENCODE_DEFINE_ERROR(NonUnitaryMatrix);
QENCODE_DEFINE_ERROR(PhotonNumberMismatch);
QENCODE_DEFINE_ERROR(DuplicateChannel);
QENCODE_DEFINE_ERROR(BadTransmissivity);
QENCODE_DEFINE_ERROR(NotPSD);
QENCODE_DEFINE_ERROR(UnknownDetector);
QENCODE_DEFINE_ERROR(ZeroProbabilityPattern);
QENCODE_DEFINE_ERROR(AsymmetricInput);
QENCODE_DEFINE_ERROR(DegenerateFit);
QENCODE_DEFINE_ERROR(CalibrationFailed);
QENCODE_DEFINE_ERROR(ConfigError);

#undef QENCODE_DEFINE_ERROR

} // namespace qencode
