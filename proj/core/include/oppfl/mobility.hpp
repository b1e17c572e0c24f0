#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oppfl/rng.hpp"

namespace oppfl {

// Heavy-tailed movement parameters. Flight lengths and pause durations both
// follow a truncated power law with density ~ l^-(1+exponent) on
// [cap/1000, cap].
struct LevyParams {
  double flight_exponent = 1.5;
  double flight_cap = 500.0;  // distance units
  double pause_exponent = 1.5;
  double pause_cap = 600.0;  // seconds
  double speed = 1.5;        // distance units per second
  void validate() const;
};

// Bounded square with a 3x3 region grid.
struct Arena {
  double side_length = 1000.0;
  double comm_range = 50.0;
  double tick_seconds = 1.0;
  int region_of(double x, double y) const;
  double region_side() const { return side_length / 3.0; }
  void validate() const;
};

// Per-tick positions over the whole run; episodes start and end at the
// device's home point inside its anchor region.
struct Trajectory {
  int device_id = 0;
  int anchor_region = 0;
  bool teleported_home = false;  // a return-home flight could not complete in time
  std::vector<double> xs;
  std::vector<double> ys;
};

// Maximal interval during which two devices stay within comm range.
struct Encounter {
  int device_a = 0;
  int device_b = 0;
  long start_tick = 0;
  long duration_ticks = 0;
};

// Inverse-CDF draw from the truncated power law; always < cap.
double sample_truncated_levy(double exponent, double cap, Rng& rng);

// One trajectory per device (devices_per_region per region, 9 regions),
// alternating Levy pauses and constant-speed straight flights with
// reflecting walls, routed home before each episode ends.
std::vector<Trajectory> generate_trajectories(const Arena& arena, const LevyParams& params,
                                              int devices_per_region, int episodes,
                                              long episode_ticks, std::uint64_t seed);

// All maximal proximity intervals, ordered by (start tick, device ids).
std::vector<Encounter> detect_encounters(const Arena& arena,
                                         std::span<const Trajectory> trajectories);

// Exact contact duration (the perfect-prediction oracle).
double contact_duration_seconds(const Encounter& encounter, const Arena& arena);

}  // namespace oppfl
