#include "helm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "helm/errors.hpp"
#include "helm/quadrature.hpp"

namespace helm {
namespace {

constexpr double kPi = std::numbers::pi;

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double min_angle_deg(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
  auto corner = [](const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
    const Eigen::Vector2d u = q - p, v = r - p;
    const double cross = u.x() * v.y() - u.y() * v.x();
    return std::atan2(std::abs(cross), u.dot(v));
  };
  const double m = std::min({corner(a, b, c), corner(b, c, a), corner(c, a, b)});
  return m * 180.0 / kPi;
}

int round_up_multiple(int n, int m) { return ((n + m - 1) / m) * m; }

struct LadderParams {
  int n_theta = 0;
  int per_octave = 1; // ladder ratio q = 2^(1/per_octave)
};

LadderParams ladder_params(double stretch, double target_h) {
  LadderParams p;
  p.n_theta = round_up_multiple(std::max(8, static_cast<int>(std::ceil(2.0 * kPi * stretch / target_h))), 8);
  const double dtheta = 2.0 * kPi / p.n_theta;
  p.per_octave = std::max(1, static_cast<int>(std::llround(std::numbers::ln2 / dtheta)));
  return p;
}

std::vector<double> make_ladder(double r_hat, int per_octave, int layers) {
  std::vector<double> r(layers + 1);
  for (int i = 0; i <= layers; ++i)
    r[i] = r_hat * std::pow(2.0, static_cast<double>(i) / per_octave);
  return r;
}

void append_ring_quads(TriMesh& mesh, int ring_lo_base, int ring_hi_base, int n_theta,
                       bool best_diagonal) {
  // counterclockwise quad: inner_j -> outer_j -> outer_{j+1} -> inner_{j+1}
  for (int j = 0; j < n_theta; ++j) {
    const int jn = (j + 1) % n_theta;
    const int a = ring_lo_base + j;
    const int b = ring_hi_base + j;
    const int c = ring_hi_base + jn;
    const int d = ring_lo_base + jn;
    bool use_ac = true;
    if (best_diagonal) {
      const auto& pa = mesh.vertices[a];
      const auto& pb = mesh.vertices[b];
      const auto& pc = mesh.vertices[c];
      const auto& pd = mesh.vertices[d];
      const double q_ac = std::min(min_angle_deg(pa, pb, pc), min_angle_deg(pa, pc, pd));
      const double q_bd = std::min(min_angle_deg(pa, pb, pd), min_angle_deg(pb, pc, pd));
      use_ac = q_ac >= q_bd;
    }
    if (use_ac) {
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    } else {
      mesh.triangles.push_back({a, b, d});
      mesh.triangles.push_back({b, c, d});
    }
  }
}

void append_boundary_rings(TriMesh& mesh, int n_theta, int outer_base) {
  for (int j = 0; j < n_theta; ++j) {
    const int jn = (j + 1) % n_theta;
    mesh.boundary_edges.push_back({j, jn, BoundaryTag::InnerGamma});
    mesh.boundary_edges.push_back({outer_base + j, outer_base + jn, BoundaryTag::OuterGamma});
  }
}

TriMesh build_annulus(double r_hat, double r_outer, int n_theta, int per_octave) {
  const int layers =
      std::max(1, static_cast<int>(std::llround(per_octave * std::log2(r_outer / r_hat))));
  const std::vector<double> ladder = make_ladder(r_hat, per_octave, layers);
  TriMesh mesh;
  mesh.domain = DomainSpec{Shape::Annulus, r_hat, ladder.back()};
  mesh.vertices.reserve(static_cast<std::size_t>(layers + 1) * n_theta);
  const double dtheta = 2.0 * kPi / n_theta;
  for (int i = 0; i <= layers; ++i)
    for (int j = 0; j < n_theta; ++j)
      mesh.vertices.emplace_back(ladder[i] * std::cos(j * dtheta), ladder[i] * std::sin(j * dtheta));
  for (int i = 0; i < layers; ++i)
    append_ring_quads(mesh, i * n_theta, (i + 1) * n_theta, n_theta, false);
  append_boundary_rings(mesh, n_theta, layers * n_theta);
  return mesh;
}

void laplacian_smooth(TriMesh& mesh, int iterations, double freeze_radius = 0.0) {
  std::vector<char> fixed(mesh.vertices.size(), 0);
  for (const auto& e : mesh.boundary_edges) fixed[e.a] = fixed[e.b] = 1;
  if (freeze_radius > 0)
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
      if (mesh.vertices[v].norm() <= freeze_radius) fixed[v] = 1;
  std::vector<std::vector<int>> nbr(mesh.vertices.size());
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c) {
      nbr[t[c]].push_back(t[(c + 1) % 3]);
      nbr[t[c]].push_back(t[(c + 2) % 3]);
    }
  for (auto& v : nbr) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (int it = 0; it < iterations; ++it) {
    std::vector<Eigen::Vector2d> next = mesh.vertices;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      if (fixed[v] || nbr[v].empty()) continue;
      Eigen::Vector2d s(0, 0);
      for (int w : nbr[v]) s += mesh.vertices[w];
      next[v] = s / static_cast<double>(nbr[v].size());
    }
    mesh.vertices = std::move(next);
  }
}

// Ellipse/square mesh: a geometrically graded polar collar around the hole
// up to a transition circle, then straight radial rays to the outer curve.
// Per-ray step schedule: step_i = (1 - w_i) * seam_step + w_i * tau * cap
// with a shared sqrt ramp w_i. The head matches the collar step on every
// ray; the tail scales linearly with the ray span (tau), which keeps the
// boundary-adjacent steps proportional across sectors instead of
// compounding away on the short rays.
TriMesh build_blended(const DomainSpec& spec, double target_h) {
  const double r_hat = spec.r_inner;
  const double speed_max = 2.0 * spec.outer_size; // max |d boundary/d theta|
  const int n_theta = round_up_multiple(
      std::max(8, static_cast<int>(std::ceil(2.0 * kPi * speed_max / target_h))), 8);
  const double dtheta = 2.0 * kPi / n_theta;
  const int m = std::max(1, static_cast<int>(std::llround(std::numbers::ln2 / dtheta)));
  const double g = std::pow(2.0, 1.0 / m);

  std::vector<double> dist(n_theta);
  double dist_min = 1e300, dist_max = 0;
  for (int j = 0; j < n_theta; ++j) {
    dist[j] = outer_curve_radius(spec, j * dtheta);
    dist_min = std::min(dist_min, dist[j]);
    dist_max = std::max(dist_max, dist[j]);
  }

  int collar_layers = 0;
  const double r_t_target = 0.35 * dist_min;
  if (r_t_target > r_hat * g)
    collar_layers = static_cast<int>(std::floor(m * std::log2(r_t_target / r_hat)));
  const double r_t = r_hat * std::pow(g, collar_layers);
  const double seam_step = r_t * (g - 1.0);

  const double cap = 0.85 * target_h;
  const double span_max = dist_max - r_t;
  // choose the layer count so the longest ray fits with tau = 1
  int n_blend = 2;
  while (true) {
    double head = 0, tail = 0;
    for (int i = 0; i < n_blend; ++i) {
      const double w = std::sqrt(static_cast<double>(i) / (n_blend - 1));
      head += (1.0 - w) * seam_step;
      tail += w * cap;
    }
    if (head + tail >= span_max || n_blend > 100000) break;
    ++n_blend;
  }

  TriMesh mesh;
  mesh.domain = spec;
  mesh.vertices.resize(static_cast<std::size_t>(collar_layers + n_blend + 1) * n_theta);
  for (int i = 0; i <= collar_layers; ++i)
    for (int j = 0; j < n_theta; ++j)
      mesh.vertices[static_cast<std::size_t>(i) * n_theta + j] =
          Eigen::Vector2d(r_hat * std::pow(g, i) * std::cos(j * dtheta),
                          r_hat * std::pow(g, i) * std::sin(j * dtheta));
  std::vector<double> ramp(n_blend);
  double head = 0, tail = 0;
  for (int i = 0; i < n_blend; ++i) {
    ramp[i] = std::sqrt(static_cast<double>(i) / (n_blend - 1));
    head += (1.0 - ramp[i]) * seam_step;
    tail += ramp[i] * cap;
  }
  for (int j = 0; j < n_theta; ++j) {
    const double tau = (dist[j] - r_t - head) / tail;
    double r = r_t;
    for (int b = 1; b <= n_blend; ++b) {
      r += (1.0 - ramp[b - 1]) * seam_step + ramp[b - 1] * tau * cap;
      if (b == n_blend) r = dist[j];
      const std::size_t id = static_cast<std::size_t>(collar_layers + b) * n_theta + j;
      mesh.vertices[id] = Eigen::Vector2d(r * std::cos(j * dtheta), r * std::sin(j * dtheta));
    }
  }
  const int total_layers = collar_layers + n_blend;
  for (int i = 0; i < collar_layers; ++i)
    append_ring_quads(mesh, i * n_theta, (i + 1) * n_theta, n_theta, false);
  for (int b = 0; b < n_blend; ++b)
    append_ring_quads(mesh, (collar_layers + b) * n_theta, (collar_layers + b + 1) * n_theta,
                      n_theta, true);
  append_boundary_rings(mesh, n_theta, total_layers * n_theta);
  // relax blend-band shear; the graded collar stays exact
  laplacian_smooth(mesh, 3, 0.98 * r_t);
  return mesh;
}

Eigen::Vector2d project_to_boundary(const DomainSpec& spec, BoundaryTag tag,
                                    const Eigen::Vector2d& p) {
  if (tag == BoundaryTag::InnerGamma) return p * (spec.r_inner / p.norm());
  switch (spec.shape) {
    case Shape::Annulus:
      return p * (spec.outer_size / p.norm());
    case Shape::EllipseHole: {
      const double a = 2.0 * spec.outer_size, b = spec.outer_size;
      const double s = std::sqrt((p.x() * p.x()) / (a * a) + (p.y() * p.y()) / (b * b));
      return p / s;
    }
    case Shape::SquareHole: {
      const double m = std::max(std::abs(p.x()), std::abs(p.y()));
      return p * (spec.outer_size / m);
    }
  }
  return p;
}

} // namespace

void DomainSpec::validate() const {
  if (!(r_inner > 0)) throw InvalidDomain("domain: r_inner must be positive");
  if (!(outer_size > r_inner))
    throw InvalidDomain("domain: outer size must exceed the inner radius");
}

double outer_curve_radius(const DomainSpec& spec, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  switch (spec.shape) {
    case Shape::Annulus:
      return spec.outer_size;
    case Shape::EllipseHole: {
      const double a = 2.0 * spec.outer_size, b = spec.outer_size;
      return 1.0 / std::sqrt((c * c) / (a * a) + (s * s) / (b * b));
    }
    case Shape::SquareHole:
      return spec.outer_size / std::max(std::abs(c), std::abs(s));
  }
  return spec.outer_size;
}

double TriMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double TriMesh::max_edge_length() const {
  double m = 0;
  for (const auto& t : triangles)
    for (int c = 0; c < 3; ++c)
      m = std::max(m, (vertices[t[c]] - vertices[t[(c + 1) % 3]]).norm());
  return m;
}

std::vector<int> TriMesh::boundary_vertices(BoundaryTag tag) const {
  std::set<int> s;
  for (const auto& e : boundary_edges)
    if (e.tag == tag) {
      s.insert(e.a);
      s.insert(e.b);
    }
  return {s.begin(), s.end()};
}

std::vector<int> TriMesh::boundary_loop(BoundaryTag tag) const {
  std::map<int, int> next;
  for (const auto& e : boundary_edges)
    if (e.tag == tag) next[e.a] = e.b;
  if (next.empty()) return {};
  std::vector<int> loop;
  const int start = next.begin()->first;
  int v = start;
  do {
    loop.push_back(v);
    auto it = next.find(v);
    if (it == next.end()) throw MeshFormatError("boundary loop is not closed");
    v = it->second;
    if (loop.size() > next.size()) throw MeshFormatError("boundary loop does not close");
  } while (v != start);
  return loop;
}

int TriMesh::unique_edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles)
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  return static_cast<int>(edges.size());
}

TriMesh build_mesh(const DomainSpec& spec, double target_h) {
  spec.validate();
  if (!(target_h > 0) || target_h >= spec.outer_size - spec.r_inner)
    throw InvalidDomain("build_mesh: target_h must be in (0, outer_size - r_inner)");
  TriMesh mesh;
  if (spec.shape == Shape::Annulus) {
    const auto [n_theta, per_octave] = ladder_params(spec.outer_size, target_h);
    mesh = build_annulus(spec.r_inner, spec.outer_size, n_theta, per_octave);
  } else {
    mesh = build_blended(spec, target_h);
  }
  const MeshQuality q = mesh_quality(mesh);
  if (q.min_angle_deg < 20.0)
    throw MeshQualityFailure("build_mesh: minimum angle " + std::to_string(q.min_angle_deg) +
                             " deg below 20 deg at h = " + std::to_string(target_h));
  return mesh;
}

TriMesh refine_uniform(const TriMesh& mesh) {
  TriMesh out;
  out.domain = mesh.domain;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    midpoint.emplace(key, id);
    return id;
  };
  out.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({t[1], m12, m01});
    out.triangles.push_back({t[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  for (const auto& e : mesh.boundary_edges) {
    const int m = mid(e.a, e.b);
    if (mesh.domain) out.vertices[m] = project_to_boundary(*mesh.domain, e.tag, out.vertices[m]);
    out.boundary_edges.push_back({e.a, m, e.tag});
    out.boundary_edges.push_back({m, e.b, e.tag});
  }
  return out;
}

RegionMask region_mask(const TriMesh& mesh, Region region) {
  RegionMask mask;
  mask.element_weights.assign(mesh.triangles.size(), 1.0);
  if (region == Region::FullDomain) return mask;
  // AnnulusUnit: fraction of quadrature weight inside B_1 \ B_{1/2}.
  double reach = 0;
  for (const auto& v : mesh.vertices) reach = std::max(reach, v.norm());
  if (reach < 1.0 - 1e-9)
    throw RegionOutsideDomain("region_mask: mesh does not reach the unit circle");
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    double w = 0;
    int inside = 0;
    for (const auto& qp : tri_quadrature_7) {
      const Eigen::Vector2d x = qp.l0 * a + qp.l1 * b + qp.l2 * c;
      const double r = x.norm();
      if (r >= 0.5 && r <= 1.0) {
        w += qp.w;
        ++inside;
      }
    }
    mask.element_weights[t] = (inside == 7) ? 1.0 : w;
  }
  return mask;
}

MeshQuality mesh_quality(const TriMesh& mesh) {
  MeshQuality q;
  q.triangle_count = mesh.triangle_count();
  q.min_angle_deg = 180.0;
  for (const auto& t : mesh.triangles) {
    q.min_angle_deg = std::min(
        q.min_angle_deg, min_angle_deg(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]));
    for (int c = 0; c < 3; ++c)
      q.max_edge = std::max(q.max_edge, (mesh.vertices[t[c]] - mesh.vertices[t[(c + 1) % 3]]).norm());
  }
  return q;
}

void write_mesh(const TriMesh& mesh, std::ostream& out) {
  out.precision(17);
  out << "helm-mesh v1\n";
  out << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << e.a << " " << e.b << " " << (e.tag == BoundaryTag::InnerGamma ? "inner" : "outer")
        << "\n";
}

TriMesh read_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "helm-mesh v1")
    throw MeshFormatError("mesh file: missing 'helm-mesh v1' header");
  TriMesh mesh;
  std::string word;
  std::size_t n = 0;
  if (!(in >> word >> n) || word != "vertices") throw MeshFormatError("mesh file: expected 'vertices N'");
  mesh.vertices.resize(n);
  for (auto& v : mesh.vertices)
    if (!(in >> v.x() >> v.y())) throw MeshFormatError("mesh file: truncated vertex list");
  if (!(in >> word >> n) || word != "triangles")
    throw MeshFormatError("mesh file: expected 'triangles M'");
  mesh.triangles.resize(n);
  for (auto& t : mesh.triangles)
    if (!(in >> t[0] >> t[1] >> t[2])) throw MeshFormatError("mesh file: truncated triangle list");
  if (!(in >> word >> n) || word != "boundary")
    throw MeshFormatError("mesh file: expected 'boundary P'");
  mesh.boundary_edges.resize(n);
  for (auto& e : mesh.boundary_edges) {
    std::string tag;
    if (!(in >> e.a >> e.b >> tag)) throw MeshFormatError("mesh file: truncated boundary list");
    if (tag == "inner")
      e.tag = BoundaryTag::InnerGamma;
    else if (tag == "outer")
      e.tag = BoundaryTag::OuterGamma;
    else
      throw MeshFormatError("mesh file: unknown boundary tag '" + tag + "'");
  }
  const int nv = mesh.vertex_count();
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c)
      if (t[c] < 0 || t[c] >= nv) throw MeshFormatError("mesh file: triangle index out of range");
  for (const auto& e : mesh.boundary_edges)
    if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv)
      throw MeshFormatError("mesh file: boundary index out of range");
  return mesh;
}

void write_mesh_file(const TriMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_mesh(mesh, f);
}

TriMesh read_mesh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  return read_mesh(f);
}

NestedAnnulusFamily::NestedAnnulusFamily(double r_hat, double r_outer_max, double target_h)
    : r_hat_(r_hat) {
  DomainSpec{Shape::Annulus, r_hat, r_outer_max}.validate();
  const auto [n_theta, per_octave] = ladder_params(r_outer_max, target_h);
  n_theta_ = n_theta;
  const int layers =
      std::max(1, static_cast<int>(std::llround(per_octave * std::log2(r_outer_max / r_hat))));
  ladder_ = make_ladder(r_hat, per_octave, layers);
}

int NestedAnnulusFamily::layer_for(double r_outer) const {
  int best = 1;
  for (int i = 1; i < static_cast<int>(ladder_.size()); ++i)
    if (std::abs(ladder_[i] - r_outer) < std::abs(ladder_[best] - r_outer)) best = i;
  return best;
}

double NestedAnnulusFamily::snap(double r_outer) const { return ladder_[layer_for(r_outer)]; }

int NestedAnnulusFamily::vertex_count_up_to(double r_outer) const {
  return (layer_for(r_outer) + 1) * n_theta_;
}

TriMesh NestedAnnulusFamily::mesh_up_to(double r_outer) const {
  const int top = layer_for(r_outer);
  TriMesh mesh;
  mesh.domain = DomainSpec{Shape::Annulus, r_hat_, ladder_[top]};
  const double dtheta = 2.0 * kPi / n_theta_;
  mesh.vertices.reserve(static_cast<std::size_t>(top + 1) * n_theta_);
  for (int i = 0; i <= top; ++i)
    for (int j = 0; j < n_theta_; ++j)
      mesh.vertices.emplace_back(ladder_[i] * std::cos(j * dtheta),
                                 ladder_[i] * std::sin(j * dtheta));
  for (int i = 0; i < top; ++i)
    append_ring_quads(mesh, i * n_theta_, (i + 1) * n_theta_, n_theta_, false);
  append_boundary_rings(mesh, n_theta_, top * n_theta_);
  return mesh;
}

TriangleLocator::TriangleLocator(const TriMesh& mesh) : mesh_(mesh) {
  lo_ = Eigen::Vector2d(1e300, 1e300);
  hi_ = Eigen::Vector2d(-1e300, -1e300);
  for (const auto& v : mesh.vertices) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  cell_ = std::max(mesh.max_edge_length(), 1e-12);
  nx_ = std::max(1, static_cast<int>((hi_.x() - lo_.x()) / cell_) + 1);
  ny_ = std::max(1, static_cast<int>((hi_.y() - lo_.y()) / cell_) + 1);
  bins_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    Eigen::Vector2d tlo(1e300, 1e300), thi(-1e300, -1e300);
    for (int c = 0; c < 3; ++c) {
      tlo = tlo.cwiseMin(mesh.vertices[mesh.triangles[t][c]]);
      thi = thi.cwiseMax(mesh.vertices[mesh.triangles[t][c]]);
    }
    const int i0 = std::clamp(static_cast<int>((tlo.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((thi.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tlo.y() - lo_.y()) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((thi.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) bins_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

int TriangleLocator::locate(const Eigen::Vector2d& p, std::array<double, 3>& bary) const {
  const int i = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
  for (int t : bins_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tri = mesh_.triangles[t];
    const auto& a = mesh_.vertices[tri[0]];
    const auto& b = mesh_.vertices[tri[1]];
    const auto& c = mesh_.vertices[tri[2]];
    const double area = signed_area(a, b, c);
    if (area <= 0) continue;
    const double l0 = signed_area(p, b, c) / area;
    const double l1 = signed_area(a, p, c) / area;
    const double l2 = 1.0 - l0 - l1;
    const double tol = -1e-10;
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      bary = {std::max(l0, 0.0), std::max(l1, 0.0), std::max(l2, 0.0)};
      return t;
    }
  }
  return -1;
}

} // namespace helm
