#pragma once

#include <stdexcept>
#include <string>

namespace hapdrive {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define HAPDRIVE_DEFINE_ERROR(Name)          \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

HAPDRIVE_DEFINE_ERROR(OutOfRange);          // query point too far from the path
HAPDRIVE_DEFINE_ERROR(OutsideRoad);         // pose not on the road surface
HAPDRIVE_DEFINE_ERROR(NonFinite);           // plant or device state left the finite range
HAPDRIVE_DEFINE_ERROR(IndexOutOfRange);     // feature window does not fit in the log
HAPDRIVE_DEFINE_ERROR(TooSmall);            // dataset too small to split
HAPDRIVE_DEFINE_ERROR(LogTooShort);         // log has no complete prediction window
HAPDRIVE_DEFINE_ERROR(NeverReachedTarget);  // vehicle never reached the target speed
HAPDRIVE_DEFINE_ERROR(SimulationDiverged);
HAPDRIVE_DEFINE_ERROR(ConfigInvalid);
HAPDRIVE_DEFINE_ERROR(FormatError);         // malformed file or message
HAPDRIVE_DEFINE_ERROR(SchemaError);         // run log failed validation

#undef HAPDRIVE_DEFINE_ERROR

}  // namespace hapdrive
