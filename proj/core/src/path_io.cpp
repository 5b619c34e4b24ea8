#include <cstdio>

#include "ttpark/planner.hpp"

namespace ttpark {

std::string path_to_csv(const PlannedPath& path) {
  std::string out = "t_index,x,y,psi,psi_t,v,delta,direction\n";
  char line[256];
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const auto& s = path.states[i];
    ControlInput u{};
    int dir = 1;
    if (i < path.transitions()) {
      u = path.controls[i];
      dir = static_cast<int>(path.directions[i]);
    } else if (path.transitions() > 0) {
      dir = static_cast<int>(path.directions.back());
    }
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", i, s.x(), s.y(), s.psi(),
                  s.psi_t(), u.v, u.delta, dir);
    out += line;
  }
  return out;
}

}  // namespace ttpark
