#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace hops {

std::uint64_t fnv1a64(const void* data, std::size_t bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ull);
std::string to_hex(std::uint64_t v);

// Content hash plus row count; used to tag what a fitted object was trained on.
struct Fingerprint {
  std::uint64_t hash = 0;
  std::uint64_t rows = 0;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

// Runs fn(i) for i in [0, count). thread_count <= 1 executes inline. Callers
// must write results to per-index slots so the outcome is schedule-independent.
void parallel_for(std::size_t count, unsigned thread_count,
                  const std::function<void(std::size_t)>& fn);

unsigned default_thread_count();

// Warnings go to a process-wide sink (stderr unless replaced).
void emit_warning(const std::string& message);
using WarningHandler = std::function<void(const std::string&)>;
WarningHandler set_warning_handler(WarningHandler handler);

std::string env_or(const char* name, const std::string& fallback);

}  // namespace hops
