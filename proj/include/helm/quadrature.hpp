#pragma once

#include <array>

namespace helm {

// Degree-5 seven-point triangle rule in barycentric coordinates; weights
// are normalized to sum to 1 (multiply by the triangle area).
struct TriQuadPoint {
  double l0, l1, l2;
  double w;
};

inline constexpr std::array<TriQuadPoint, 7> tri_quadrature_7 = [] {
  constexpr double w_c = 9.0 / 40.0;
  constexpr double a1 = 0.059715871789769820;
  constexpr double b1 = 0.470142064105115090;
  constexpr double w1 = 0.132394152788506181;
  constexpr double a2 = 0.797426985353087322;
  constexpr double b2 = 0.101286507323456339;
  constexpr double w2 = 0.125939180544827153;
  return std::array<TriQuadPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, w_c},
                                      {a1, b1, b1, w1},
                                      {b1, a1, b1, w1},
                                      {b1, b1, a1, w1},
                                      {a2, b2, b2, w2},
                                      {b2, a2, b2, w2},
                                      {b2, b2, a2, w2}}};
}();

// Two-point Gauss rule on [0,1]; weights sum to 1 (multiply by length).
struct EdgeQuadPoint {
  double t;
  double w;
};

inline constexpr std::array<EdgeQuadPoint, 2> edge_quadrature_2 = [] {
  constexpr double s = 0.288675134594812882; // 1/(2 sqrt(3))
  return std::array<EdgeQuadPoint, 2>{{{0.5 - s, 0.5}, {0.5 + s, 0.5}}};
}();

} // namespace helm
