#include "fhn/trajectory.hpp"

#include <string>

#include "fhn/errors.hpp"

namespace fhn {

void TrajectoryLog::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.y.size() != outputs || s.y_ref.size() != outputs || s.i_se.size() != outputs) {
      throw DomainError("trajectory sample " + std::to_string(i) +
                        " has the wrong number of output components");
    }
    if (i > 0 && !(s.t > samples[i - 1].t)) {
      throw DomainError("trajectory times must be strictly increasing (sample " +
                        std::to_string(i) + ")");
    }
  }
}

}  // namespace fhn
