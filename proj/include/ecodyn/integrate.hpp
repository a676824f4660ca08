// Adaptive Dormand-Prince 5(4) integration of the three formulations with
// cubic Hermite dense output and event monitoring.
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ecodyn/equilibria.hpp"
#include "ecodyn/model.hpp"

namespace ecodyn {

struct IntegrationConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_end = 100.0;
  std::size_t max_steps = 20'000'000;
  double min_step = 1e-12;
  std::size_t record_stride = 1;
  /// Points before this time are not stored (the final point always is).
  double record_after = 0.0;
  /// delta_eq: distance_to threshold for equilibrium capture.
  double equilibrium_tol = 1e-6;
  std::size_t capture_steps = 50;
  /// Relative excess over the invariant-region bounds that counts as an exit.
  double region_tol = 1e-9;
  bool stop_on_capture = false;

  bool operator==(const IntegrationConfig&) const = default;
};

enum class EventKind { RegionExit, EquilibriumCapture, StepFloorHit };
const char* to_string(EventKind k);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::RegionExit;
  /// RegionExit: relative excess; EquilibriumCapture: index into the
  /// equilibria_all() list; StepFloorHit: the error norm accepted at the floor.
  double value = 0.0;
};

using Vec3 = std::array<double, 3>;

struct Trajectory {
  Formulation formulation = Formulation::Full;
  int dim = 3;
  std::vector<double> times;
  std::vector<Vec3> states;  // components beyond dim are zero
  std::vector<Vec3> slopes;  // vector field at each recorded point
  std::vector<Event> events;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  std::size_t size() const { return times.size(); }
  bool has_event(EventKind k) const;
  std::size_t count_events(EventKind k) const;
  /// Cubic Hermite interpolant on the recorded points; t is clamped to the
  /// recorded range. Accurate only when record_stride == 1.
  Vec3 sample(double t) const;
  /// Hermite interpolant on segment [times[i], times[i+1]] at local theta in [0, 1].
  Vec3 hermite(std::size_t i, double theta) const;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector field of `f` at `y`; components beyond the formulation's dimension
/// are ignored and returned as zero.
Vec3 vector_field(const Params& p, Formulation f, const Vec3& y);

/// Maps a full-system state into the coordinates of `f`.
Vec3 project(Formulation f, const StateFull& s, double m);

/// Throws SignError if `initial` violates the formulation's sign domain,
/// IntegrationError on max_steps or a non-finite state.
Trajectory integrate(const Params& p, Formulation f, const Vec3& initial,
                     const IntegrationConfig& cfg);

/// sqrt(sum(((s_i - q_i) / max(1, |q_i|))^2)): scaled by the second argument.
double distance_to(std::span<const double> s, std::span<const double> equilibrium);

}  // namespace ecodyn
