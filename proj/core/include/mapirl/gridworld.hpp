#pragma once

#include "mapirl/mdp.hpp"

namespace mapirl {
namespace gridworld {

enum Action : ActionId { kWest = 0, kEast = 1, kNorth = 2, kSouth = 3, kStill = 4 };
inline constexpr int kActionCount = 5;

inline StateId state_index(int x, int y, int side) { return static_cast<StateId>(y * side + x); }
inline int x_of(StateId s, int side) { return static_cast<int>(s) % side; }
inline int y_of(StateId s, int side) { return static_cast<int>(s) / side; }

}  // namespace gridworld

/// Axis-aligned cell rectangle, inclusive bounds.
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool intersects(const Rect& o) const {
    return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
  }
};

/// Two rewarded corner regions; every other cell forms the implicit third
/// region with `outside_reward`.
struct RegionSpec {
  Rect lower_left;
  Rect upper_right;
  double region_reward = 1.0;
  double outside_reward = -0.1;

  /// Corner blocks of side/4 cells (at least 1), the 8x8 blocks of a 32x32
  /// grid.
  static RegionSpec corners(int side);
};

struct GridworldConfig {
  int side = 32;
  double slip = 0.3;
  /// The slip mixture draws uniformly from all 5 moves; clearing this
  /// excludes the chosen move and draws from the other 4.
  bool slip_includes_chosen = true;
  double discount = 0.95;
  RegionSpec regions = RegionSpec::corners(32);  // matches the default side
};

/// side x side grid, 5 moves (west/east/north/south/still), uniform start
/// distribution, no terminal states. With probability `slip` the chosen move
/// is replaced by a random one; off-grid moves leave the position unchanged.
/// The reward depends on the state only.
MdpModel build_gridworld(const GridworldConfig& config);
MdpModel build_gridworld(int side, double slip, const RegionSpec& regions);

}  // namespace mapirl
