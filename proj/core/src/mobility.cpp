#include "oppfl/mobility.hpp"

#include <algorithm>
#include <cmath>

#include "oppfl/errors.hpp"

namespace oppfl {

void LevyParams::validate() const {
  if (!(flight_exponent > 0.0) || flight_exponent > 2.0 || !(pause_exponent > 0.0) ||
      pause_exponent > 2.0)
    throw ParameterError("Levy exponents must lie in (0, 2]");
  if (!(flight_cap > 0.0) || !(pause_cap > 0.0))
    throw ParameterError("Levy caps must be positive");
  if (!(speed > 0.0)) throw ParameterError("speed must be positive");
}

void Arena::validate() const {
  if (!(side_length > 0.0)) throw ParameterError("arena side must be positive");
  if (!(tick_seconds > 0.0)) throw ParameterError("tick must be positive");
  if (!(comm_range > 0.0) || comm_range >= region_side())
    throw ParameterError("comm range must be positive and below the region side");
}

int Arena::region_of(double x, double y) const {
  const double rs = region_side();
  const int col = std::clamp(static_cast<int>(x / rs), 0, 2);
  const int row = std::clamp(static_cast<int>(y / rs), 0, 2);
  return row * 3 + col;
}

double sample_truncated_levy(double exponent, double cap, Rng& rng) {
  if (!(exponent > 0.0) || exponent > 2.0)
    throw ParameterError("Levy exponent must lie in (0, 2]");
  if (!(cap > 0.0)) throw ParameterError("Levy cap must be positive");
  // Power law l^-(1+z) needs a lower cutoff to normalize; cap/1000 keeps
  // three decades of dynamic range.
  const double lo = cap / 1000.0;
  const double a = std::pow(lo, -exponent);
  const double b = std::pow(cap, -exponent);
  const double u = rng.uniform();
  return std::pow(a - u * (a - b), -1.0 / exponent);
}

namespace {

struct Walker {
  enum class Mode { Pausing, Flying, Returning } mode = Mode::Pausing;
  double x = 0.0, y = 0.0;
  double home_x = 0.0, home_y = 0.0;
  long pause_ticks_left = 0;
  double heading_x = 0.0, heading_y = 0.0;
  double flight_left = 0.0;
};

void reflect(double& p, double& dir, double side) {
  while (p < 0.0 || p > side) {
    if (p < 0.0) {
      p = -p;
      dir = -dir;
    } else {
      p = 2.0 * side - p;
      dir = -dir;
    }
  }
}

}  // namespace

std::vector<Trajectory> generate_trajectories(const Arena& arena, const LevyParams& params,
                                              int devices_per_region, int episodes,
                                              long episode_ticks, std::uint64_t seed) {
  arena.validate();
  params.validate();
  if (devices_per_region < 1) throw ParameterError("need at least one device per region");
  if (episodes < 1 || episode_ticks < 1)
    throw ParameterError("episodes and episode ticks must be >= 1");

  const double step = params.speed * arena.tick_seconds;
  const double rs = arena.region_side();
  const int device_count = devices_per_region * 9;

  std::vector<Trajectory> trajectories(static_cast<std::size_t>(device_count));
  for (int d = 0; d < device_count; ++d) {
    const int region = d / devices_per_region;
    const int row = region / 3;
    const int col = region % 3;
    Rng rng = Rng::stream(seed, "mobility", static_cast<std::uint64_t>(d));

    Trajectory& traj = trajectories[static_cast<std::size_t>(d)];
    traj.device_id = d;
    traj.anchor_region = region;
    traj.xs.reserve(static_cast<std::size_t>(episodes) * episode_ticks);
    traj.ys.reserve(static_cast<std::size_t>(episodes) * episode_ticks);

    Walker w;
    w.home_x = col * rs + rng.uniform(0.05, 0.95) * rs;
    w.home_y = row * rs + rng.uniform(0.05, 0.95) * rs;

    auto sample_pause_ticks = [&] {
      const double secs = sample_truncated_levy(params.pause_exponent, params.pause_cap, rng);
      return std::max<long>(1, std::lround(secs / arena.tick_seconds));
    };
    auto start_flight = [&] {
      w.mode = Walker::Mode::Flying;
      w.flight_left = sample_truncated_levy(params.flight_exponent, params.flight_cap, rng);
      const double theta = rng.uniform(0.0, 6.283185307179586476925286766559);
      w.heading_x = std::cos(theta);
      w.heading_y = std::sin(theta);
    };

    for (int ep = 0; ep < episodes; ++ep) {
      const double off = std::hypot(w.x - w.home_x, w.y - w.home_y);
      if (ep == 0) {
        // run start
      } else if (off > 1e-9) {
        traj.teleported_home = true;
      }
      w.x = w.home_x;
      w.y = w.home_y;
      w.mode = Walker::Mode::Pausing;
      w.pause_ticks_left = sample_pause_ticks();

      for (long t = 0; t < episode_ticks; ++t) {
        traj.xs.push_back(w.x);
        traj.ys.push_back(w.y);

        const long steps_left = episode_ticks - 1 - t;
        const double home_dist = std::hypot(w.x - w.home_x, w.y - w.home_y);
        const long ticks_home = static_cast<long>(std::ceil(home_dist / step));
        if (w.mode != Walker::Mode::Returning && steps_left <= ticks_home + 1)
          w.mode = Walker::Mode::Returning;

        switch (w.mode) {
          case Walker::Mode::Pausing:
            if (--w.pause_ticks_left <= 0) start_flight();
            break;
          case Walker::Mode::Flying: {
            const double move = std::min(step, w.flight_left);
            w.x += w.heading_x * move;
            w.y += w.heading_y * move;
            reflect(w.x, w.heading_x, arena.side_length);
            reflect(w.y, w.heading_y, arena.side_length);
            w.flight_left -= move;
            if (w.flight_left <= 0.0) {
              w.mode = Walker::Mode::Pausing;
              w.pause_ticks_left = sample_pause_ticks();
            }
            break;
          }
          case Walker::Mode::Returning: {
            const double d_home = std::hypot(w.home_x - w.x, w.home_y - w.y);
            if (d_home <= step) {
              w.x = w.home_x;
              w.y = w.home_y;
            } else {
              w.x += (w.home_x - w.x) / d_home * step;
              w.y += (w.home_y - w.y) / d_home * step;
            }
            break;
          }
        }
      }
    }
  }
  return trajectories;
}

std::vector<Encounter> detect_encounters(const Arena& arena,
                                         std::span<const Trajectory> trajectories) {
  arena.validate();
  if (trajectories.empty()) return {};
  const std::size_t ticks = trajectories.front().xs.size();
  for (const auto& t : trajectories)
    if (t.xs.size() != ticks || t.ys.size() != ticks)
      throw DimensionError("trajectories must have equal length");

  const double range_sq = arena.comm_range * arena.comm_range;
  std::vector<Encounter> encounters;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    for (std::size_t j = i + 1; j < trajectories.size(); ++j) {
      const auto& a = trajectories[i];
      const auto& b = trajectories[j];
      long start = -1;
      for (std::size_t t = 0; t < ticks; ++t) {
        const double dx = a.xs[t] - b.xs[t];
        const double dy = a.ys[t] - b.ys[t];
        const bool in_range = dx * dx + dy * dy <= range_sq;
        if (in_range && start < 0) start = static_cast<long>(t);
        if (!in_range && start >= 0) {
          encounters.push_back(
              {a.device_id, b.device_id, start, static_cast<long>(t) - start});
          start = -1;
        }
      }
      if (start >= 0)
        encounters.push_back(
            {a.device_id, b.device_id, start, static_cast<long>(ticks) - start});
    }
  }
  std::sort(encounters.begin(), encounters.end(), [](const Encounter& l, const Encounter& r) {
    return std::tie(l.start_tick, l.device_a, l.device_b) <
           std::tie(r.start_tick, r.device_a, r.device_b);
  });
  return encounters;
}

double contact_duration_seconds(const Encounter& encounter, const Arena& arena) {
  return static_cast<double>(encounter.duration_ticks) * arena.tick_seconds;
}

}  // namespace oppfl
