#include "mrsl/random.hpp"

namespace mrsl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, Subsystem subsystem, std::uint64_t entity) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(subsystem));
  return mix64(h ^ (entity + 0xA24BAED4963EE407ULL));
}

}  // namespace mrsl
