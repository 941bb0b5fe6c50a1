#include "retcore/parallel.hpp"

#include <cstdlib>
#include <string>

#include "retcore/errors.hpp"

namespace retcore {

// requested > 0 wins; otherwise RETCORE_THREADS; otherwise hardware count.
unsigned resolve_thread_count(int requested) {
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("RETCORE_THREADS")) {
    try {
      const int parsed = std::stoi(env);
      if (parsed < 1) throw ConfigError("RETCORE_THREADS must be >= 1");
      return static_cast<unsigned>(parsed);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(std::string("invalid RETCORE_THREADS value: ") + env);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

}  // namespace retcore
