#include "capfield/grid.hpp"

#include <algorithm>
#include <cmath>

#include "capfield/common.hpp"

namespace capfield {

Axis Axis::linspace(double lo, double hi, int n) {
  Axis a;
  a.lo = lo;
  a.hi = hi;
  a.n = n;
  a.dx = n > 1 ? (hi - lo) / (n - 1) : 0.0;
  a.nodes.resize(n);
  for (int i = 0; i < n; ++i) a.nodes[i] = lo + i * a.dx;
  if (n > 1) a.nodes[n - 1] = hi;  // avoid accumulation drift at the end node
  return a;
}

int Axis::index_of(double v) const {
  if (n < 2 || v <= lo) return 0;
  if (v >= hi) return n - 1;
  int i = static_cast<int>(std::lround((v - lo) / dx));
  return std::clamp(i, 0, n - 1);
}

double Axis::clamp(double v) const { return std::clamp(v, lo, hi); }

void validate_grid(const SectorGrid& g) {
  auto check_axis = [](const Axis& a, const char* name, bool positive, int min_nodes) {
    if (a.n < min_nodes)
      throw ConfigError(std::string(name) + ": need at least " + std::to_string(min_nodes) +
                        (min_nodes == 1 ? " node" : " nodes"));
    if (a.n > 1 && !(a.hi > a.lo))
      throw ConfigError(std::string(name) + ": axis range must be increasing");
    if (positive && !(a.lo > 0.0))
      throw ConfigError(std::string(name) + ": capital axis must start above 0");
    for (int i = 1; i < a.n; ++i)
      if (!(a.nodes[i] > a.nodes[i - 1]))
        throw ConfigError(std::string(name) + ": nodes must be strictly increasing");
  };
  // a single sector node is allowed: the model degenerates to a scalar
  // fixed point and X integrals become point evaluations
  check_axis(g.x, "grid.x", false, 1);
  check_axis(g.k, "grid.k", true, 2);
  check_axis(g.khat, "grid.khat", true, 2);
}

}  // namespace capfield
