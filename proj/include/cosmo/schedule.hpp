#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace cosmo {

enum class ScheduleKind { constant, emc, li_mc, log_mc };

std::string_view to_string(ScheduleKind kind);
/// Accepts "constant", "emc", "li-mc", "log-mc". Throws Error(usage).
ScheduleKind parse_schedule_kind(std::string_view name);

/// Cooling schedule mapping a step index to a temperature:
///   emc     T0 * a^i               (0.8 <= a <= 0.9)
///   li-mc   T0 / (1 + a*i)         (a > 0)
///   log-mc  T0 / (1 + a*log(1+i))  (a > 1)
///   constant T0
/// Parameters are checked at construction.
class AnnealSchedule {
 public:
  AnnealSchedule() = default;
  AnnealSchedule(ScheduleKind kind, double t0, double a = 0.0);

  static AnnealSchedule constant(double t0 = 1.0) { return {ScheduleKind::constant, t0}; }

  ScheduleKind kind() const noexcept { return kind_; }
  double initial() const noexcept { return t0_; }
  double coefficient() const noexcept { return a_; }

  double temperature(std::size_t step) const noexcept;

  bool operator==(const AnnealSchedule&) const = default;

 private:
  ScheduleKind kind_ = ScheduleKind::constant;
  double t0_ = 1.0;
  double a_ = 0.0;
};

inline double temperature(const AnnealSchedule& schedule, std::size_t step) noexcept {
  return schedule.temperature(step);
}

}  // namespace cosmo
