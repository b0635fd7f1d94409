#include "cryf/parallel.hpp"

#include <cstdlib>
#include <string>

namespace cryf {

unsigned thread_width() {
  static const unsigned width = [] {
    if (const char* env = std::getenv("CRYF_THREADS")) {
      try {
        const long requested = std::stol(env);
        if (requested > 0) return static_cast<unsigned>(requested);
      } catch (const std::exception&) {
        // Malformed values fall back to auto.
      }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1U : hw;
  }();
  return width;
}

}  // namespace cryf
