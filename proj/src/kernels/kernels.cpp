#include "dlsq/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace dlsq::kernels {
namespace {

const Backend* pick_auto() {
#ifdef DLSQ_KERNELS_AVX2
  if (avx2_supported()) return &avx2_backend();
#endif
#ifdef DLSQ_KERNELS_NEON
  return &neon_backend();
#endif
  return &scalar_backend();
}

std::atomic<const Backend*> g_active{nullptr};

}  // namespace

const Backend& active() {
  const Backend* b = g_active.load(std::memory_order_acquire);
  if (!b) {
    b = pick_auto();
    g_active.store(b, std::memory_order_release);
  }
  return *b;
}

void select(std::string_view name) {
  if (name == "auto") {
    g_active.store(pick_auto(), std::memory_order_release);
    return;
  }
  if (name == "scalar") {
    g_active.store(&scalar_backend(), std::memory_order_release);
    return;
  }
#ifdef DLSQ_KERNELS_AVX2
  if (name == "avx2") {
    if (!avx2_supported())
      throw std::invalid_argument("kernels: avx2 not supported on this cpu");
    g_active.store(&avx2_backend(), std::memory_order_release);
    return;
  }
#endif
#ifdef DLSQ_KERNELS_NEON
  if (name == "neon") {
    g_active.store(&neon_backend(), std::memory_order_release);
    return;
  }
#endif
  throw std::invalid_argument("kernels: unknown backend '" + std::string(name) + "'");
}

std::vector<std::string> available() {
  std::vector<std::string> out{"scalar"};
#ifdef DLSQ_KERNELS_AVX2
  if (avx2_supported()) out.emplace_back("avx2");
#endif
#ifdef DLSQ_KERNELS_NEON
  out.emplace_back("neon");
#endif
  return out;
}

}  // namespace dlsq::kernels
