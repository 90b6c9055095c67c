#include "roughcadlag/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace roughcadlag {

std::size_t thread_limit() {
  if (const char* env = std::getenv("ROUGHCADLAG_THREADS")) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      if (text.empty() || text[0] < '0' || text[0] > '9') throw std::invalid_argument(text);
      const unsigned long v = std::stoul(text, &used);
      if (used == text.size() && v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace roughcadlag
