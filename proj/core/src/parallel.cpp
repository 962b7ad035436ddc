#include "cqed/parallel.hpp"

namespace cqed {

namespace {
std::atomic<unsigned> g_workers{0};
}

void set_default_workers(unsigned n) { g_workers = n; }

unsigned default_workers() {
  const unsigned n = g_workers.load();
  if (n != 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace cqed
