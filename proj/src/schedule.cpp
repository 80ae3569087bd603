#include "cosmo/schedule.hpp"

#include <cmath>

#include "cosmo/error.hpp"

namespace cosmo {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::emc: return "emc";
    case ScheduleKind::li_mc: return "li-mc";
    case ScheduleKind::log_mc: return "log-mc";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return ScheduleKind::constant;
  if (name == "emc") return ScheduleKind::emc;
  if (name == "li-mc") return ScheduleKind::li_mc;
  if (name == "log-mc") return ScheduleKind::log_mc;
  fail(ErrorKind::usage, "unknown schedule '" + std::string(name) + "'");
}

AnnealSchedule::AnnealSchedule(ScheduleKind kind, double t0, double a)
    : kind_(kind), t0_(t0), a_(a) {
  if (!(t0 > 0.0) || !std::isfinite(t0)) {
    fail(ErrorKind::usage, "initial temperature must be positive");
  }
  const bool ok = [&] {
    switch (kind) {
      case ScheduleKind::constant: return true;
      case ScheduleKind::emc: return a >= 0.8 && a <= 0.9;
      case ScheduleKind::li_mc: return a > 0.0 && std::isfinite(a);
      case ScheduleKind::log_mc: return a > 1.0 && std::isfinite(a);
    }
    return false;
  }();
  if (!ok) {
    fail(ErrorKind::usage, "coefficient " + std::to_string(a) + " outside the valid range for " +
                               std::string(to_string(kind)));
  }
}

double AnnealSchedule::temperature(std::size_t step) const noexcept {
  const double i = static_cast<double>(step);
  switch (kind_) {
    case ScheduleKind::constant: return t0_;
    case ScheduleKind::emc: return t0_ * std::pow(a_, i);
    case ScheduleKind::li_mc: return t0_ / (1.0 + a_ * i);
    case ScheduleKind::log_mc: return t0_ / (1.0 + a_ * std::log(1.0 + i));
  }
  return t0_;
}

}  // namespace cosmo
