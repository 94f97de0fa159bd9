#include "hops/kernels.hpp"

#include <atomic>

#include "hops/util.hpp"

namespace hops::kern {
namespace {

const Ops* pick_default() {
  std::string pref = env_or("HOPS_SIMD", "auto");
  if (pref != "auto") {
    if (pref == "scalar") return &scalar_ops();
#if defined(__x86_64__) || defined(__i386__)
    if (pref == "avx2" && avx2_supported()) return &avx2_ops();
#endif
#if defined(__aarch64__)
    if (pref == "neon") return &neon_ops();
#endif
    emit_warning("HOPS_SIMD=" + pref + " not available on this machine, using auto");
  }
#if defined(__x86_64__) || defined(__i386__)
  if (avx2_supported()) return &avx2_ops();
#endif
#if defined(__aarch64__)
  return &neon_ops();
#endif
  return &scalar_ops();
}

std::atomic<const Ops*>& active() {
  static std::atomic<const Ops*> table{pick_default()};
  return table;
}

}  // namespace

const Ops& ops() { return *active().load(std::memory_order_relaxed); }

bool set_backend(std::string_view name) {
  if (name == "auto") {
    active().store(pick_default(), std::memory_order_relaxed);
    return true;
  }
  if (name == "scalar") {
    active().store(&scalar_ops(), std::memory_order_relaxed);
    return true;
  }
#if defined(__x86_64__) || defined(__i386__)
  if (name == "avx2" && avx2_supported()) {
    active().store(&avx2_ops(), std::memory_order_relaxed);
    return true;
  }
#endif
#if defined(__aarch64__)
  if (name == "neon") {
    active().store(&neon_ops(), std::memory_order_relaxed);
    return true;
  }
#endif
  return false;
}

const char* backend_name() { return ops().name; }

}  // namespace hops::kern
