#include "mapirl/gridworld.hpp"

#include <map>
#include <stdexcept>

namespace mapirl {

RegionSpec RegionSpec::corners(int side) {
  const int block = std::max(1, side / 4);
  RegionSpec spec;
  spec.lower_left = {0, 0, block - 1, block - 1};
  spec.upper_right = {side - block, side - block, side - 1, side - 1};
  return spec;
}

namespace {

constexpr int kDx[] = {-1, 1, 0, 0, 0};
constexpr int kDy[] = {0, 0, 1, -1, 0};

StateId apply_move(int x, int y, int move, int side) {
  const int nx = x + kDx[move];
  const int ny = y + kDy[move];
  if (nx < 0 || nx >= side || ny < 0 || ny >= side) return gridworld::state_index(x, y, side);
  return gridworld::state_index(nx, ny, side);
}

}  // namespace

MdpModel build_gridworld(const GridworldConfig& config) {
  const int side = config.side;
  if (side < 2) throw std::invalid_argument("build_gridworld: side must be at least 2");
  if (config.slip < 0.0 || config.slip >= 1.0)
    throw std::invalid_argument("build_gridworld: slip must be in [0,1)");
  const RegionSpec& reg = config.regions;
  auto in_bounds = [side](const Rect& r) {
    return r.x0 >= 0 && r.y0 >= 0 && r.x1 < side && r.y1 < side && r.x0 <= r.x1 && r.y0 <= r.y1;
  };
  if (!in_bounds(reg.lower_left) || !in_bounds(reg.upper_right) ||
      reg.lower_left.intersects(reg.upper_right))
    throw std::invalid_argument("build_gridworld: regions overlap or fall outside the grid");

  const int n = side * side;
  MdpModel m;
  m.state_count = n;
  m.action_count = gridworld::kActionCount;
  m.discount = config.discount;
  std::vector<ActionId> all{gridworld::kWest, gridworld::kEast, gridworld::kNorth,
                            gridworld::kSouth, gridworld::kStill};
  m.legal.assign(static_cast<std::size_t>(n), all);
  m.rows.assign(static_cast<std::size_t>(n) * gridworld::kActionCount, {});
  m.true_reward.assign(static_cast<std::size_t>(n) * gridworld::kActionCount, 0.0);
  m.start_dist.assign(static_cast<std::size_t>(n), 1.0 / n);
  m.terminal.assign(static_cast<std::size_t>(n), false);

  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const StateId s = gridworld::state_index(x, y, side);
      const bool rewarded = reg.lower_left.contains(x, y) || reg.upper_right.contains(x, y);
      const double r = rewarded ? reg.region_reward : reg.outside_reward;
      for (int a = 0; a < gridworld::kActionCount; ++a) {
        std::map<StateId, double> mass;
        mass[apply_move(x, y, a, side)] += 1.0 - config.slip;
        if (config.slip > 0.0) {
          if (config.slip_includes_chosen) {
            for (int mv = 0; mv < 5; ++mv)
              mass[apply_move(x, y, mv, side)] += config.slip / 5.0;
          } else {
            for (int mv = 0; mv < 5; ++mv)
              if (mv != a) mass[apply_move(x, y, mv, side)] += config.slip / 4.0;
          }
        }
        auto& row = m.rows[m.sa_index(s, a)];
        for (const auto& [ns, pr] : mass) row.push_back({ns, pr});
        m.true_reward[m.sa_index(s, a)] = r;
      }
    }
  }

  m.validate();
  return m;
}

MdpModel build_gridworld(int side, double slip, const RegionSpec& regions) {
  GridworldConfig config;
  config.side = side;
  config.slip = slip;
  config.regions = regions;
  return build_gridworld(config);
}

}  // namespace mapirl
