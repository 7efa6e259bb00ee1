#pragma once

#include <stdexcept>
#include <string>

namespace checkin {

// Root of every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CHECKIN_DEFINE_ERROR(Name)  \
  class Name : public Error {       \
   public:                          \
    using Error::Error;             \
  }

CHECKIN_DEFINE_ERROR(InvalidCoordinate);
CHECKIN_DEFINE_ERROR(OutOfProjectionRange);
CHECKIN_DEFINE_ERROR(UnknownUser);
CHECKIN_DEFINE_ERROR(UnknownVenue);
CHECKIN_DEFINE_ERROR(ClockRegression);
CHECKIN_DEFINE_ERROR(IoFailure);
CHECKIN_DEFINE_ERROR(CorruptSnapshot);
CHECKIN_DEFINE_ERROR(NoVenuesAvailable);
CHECKIN_DEFINE_ERROR(UnknownVictim);
CHECKIN_DEFINE_ERROR(UnregisteredRouter);
CHECKIN_DEFINE_ERROR(MissingTables);
CHECKIN_DEFINE_ERROR(InvalidConfig);

#undef CHECKIN_DEFINE_ERROR

}  // namespace checkin
