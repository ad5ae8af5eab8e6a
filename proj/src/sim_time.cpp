#include "wormbench/sim_time.hpp"

#include <cmath>
#include <cstdio>

namespace wormbench {

SimTime SimTime::from_seconds(double seconds) {
  return SimTime(static_cast<std::int64_t>(std::llround(seconds * 1e9)));
}

std::string SimTime::to_string() const {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%lld.%09llds", static_cast<long long>(ns_ / 1'000'000'000),
                static_cast<long long>(ns_ % 1'000'000'000));
  return buf;
}

}  // namespace wormbench
