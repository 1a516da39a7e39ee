#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "divekit/harness.hpp"

namespace divekit {

double primal_dual_gap(double primal, double dual) {
  if (is_infinite(primal) || is_infinite(dual) || !std::isfinite(primal) || !std::isfinite(dual)) return 1.0;
  const double prod = primal * dual;
  if (!(prod > 0.0) || !std::isfinite(prod)) return 1.0;
  return (primal - dual) / std::max(std::abs(primal), std::abs(dual));
}

double primal_dual_integral(const SolveTrace& trace, double horizon, SolveTrace::Clock clock) {
  double area = 0.0, t_prev = 0.0, gap = 1.0;
  for (const auto& p : trace.points) {
    const double t = std::max(t_prev, clock == SolveTrace::Clock::kWall ? p.time : p.work);
    if (t > horizon) break;
    area += gap * (t - t_prev);
    t_prev = t;
    gap = primal_dual_gap(p.primal, p.dual);
  }
  if (horizon > t_prev) area += gap * (horizon - t_prev);
  return area;
}

double primal_gap(double z, double z_ref) { return z - z_ref; }

uint64_t fnv1a(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xF];
  return s;
}

std::string format_number(double v) {
  if (v >= kInfinity || v == HUGE_VAL) return "inf";
  if (v <= -kInfinity || v == -HUGE_VAL) return "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<Family> family_of(const std::string& instance_name) {
  for (Family f : {Family::kSetCover, Family::kCombAuction, Family::kFacilityLocation, Family::kIndepSet}) {
    const std::string prefix = family_name(f) + "-";
    if (instance_name.rfind(prefix, 0) == 0) return f;
  }
  return std::nullopt;
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min(n, static_cast<size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace divekit
