#include "recipnet/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace recipnet {

std::size_t worker_count() {
  if (const char* env = std::getenv("RECIPNET_WORKERS")) {
    std::size_t value = 0;
    const auto* end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc{} && ptr == end && value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace recipnet
