#include "loschmidt/parallel.hpp"

#include <cstdlib>
#include <string>

namespace loschmidt {

unsigned default_thread_count() {
  if (const char* env = std::getenv("LOSCHMIDT_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace loschmidt
