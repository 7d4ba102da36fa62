#include "hyerslab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hyerslab {

std::size_t thread_budget() {
  if (const char* env = std::getenv("HYERSLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to the hardware default
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace hyerslab
