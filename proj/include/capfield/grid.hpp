#pragma once

#include <vector>

namespace capfield {

// Uniform 1D axis. All field arrays in the project are flat vectors indexed
// against one or two of these.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 2;
  double dx = 1.0;
  std::vector<double> nodes;

  static Axis linspace(double lo, double hi, int n);

  double operator[](int i) const { return nodes[i]; }
  int size() const { return n; }
  // nearest node index, clamped to range
  int index_of(double v) const;
  double clamp(double v) const;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// Sector coordinate X is shared by firms and investors (the paper couples
// them through delta(X - Xhat)); capital axes differ per agent kind.
struct SectorGrid {
  Axis x;     // sectors
  Axis k;     // firm physical capital, k.lo > 0
  Axis khat;  // investor financial capital

  int idx_kx(int ix, int ik) const { return ix * k.n + ik; }
  int idx_khx(int ix, int ikh) const { return ix * khat.n + ikh; }
};

void validate_grid(const SectorGrid& g);

}  // namespace capfield
