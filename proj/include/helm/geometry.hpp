#pragma once

// Conforming triangle meshes for the three hole domains (annulus,
// ellipse-with-hole, square-with-hole). Construction is block structured:
// a geometrically graded polar core around the hole, plus (for the
// non-circular shapes) a blended band out to the outer curve.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace helm {

enum class Shape { Annulus, EllipseHole, SquareHole };

struct DomainSpec {
  Shape shape = Shape::Annulus;
  double r_inner = 0.5;  // radius of the inner circle
  double outer_size = 2; // outer radius / semi-minor axis (semi-major 2R) / half side
  void validate() const;
};

// Distance from the origin to the outer curve along direction theta.
double outer_curve_radius(const DomainSpec& spec, double theta);

enum class BoundaryTag { InnerGamma, OuterGamma };

struct BoundaryEdge {
  int a = -1, b = -1; // vertex ids, loop-ordered (domain on the left)
  BoundaryTag tag = BoundaryTag::InnerGamma;
};

struct TriMesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles; // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  std::optional<DomainSpec> domain; // set for generated meshes

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double max_edge_length() const;
  // Ordered vertex loop for one boundary tag.
  std::vector<int> boundary_loop(BoundaryTag tag) const;
  std::vector<int> boundary_vertices(BoundaryTag tag) const; // unordered, unique
  int unique_edge_count() const;
};

struct RegionMask {
  std::vector<double> element_weights; // in [0,1], one per triangle
};

enum class Region { FullDomain, AnnulusUnit };

struct MeshQuality {
  double min_angle_deg = 0;
  double max_edge = 0;
  int triangle_count = 0;
};

TriMesh build_mesh(const DomainSpec& spec, double target_h);
TriMesh refine_uniform(const TriMesh& mesh);
RegionMask region_mask(const TriMesh& mesh, Region region);
MeshQuality mesh_quality(const TriMesh& mesh);

// helm-mesh v1 text format
void write_mesh(const TriMesh& mesh, std::ostream& out);
TriMesh read_mesh(std::istream& in);
void write_mesh_file(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh_file(const std::string& path);

// Annulus meshes over a shared geometric radial ladder: the mesh for a
// smaller outer radius is a strict prefix (vertices and triangles) of the
// mesh for a larger one, so restriction of nodal fields is head(n).
class NestedAnnulusFamily {
 public:
  NestedAnnulusFamily(double r_hat, double r_outer_max, double target_h);
  // Nearest ladder radius (exact for outer radii that are r_hat * 2^p).
  double snap(double r_outer) const;
  TriMesh mesh_up_to(double r_outer) const;
  int vertex_count_up_to(double r_outer) const;
  int n_theta() const { return n_theta_; }
  const std::vector<double>& ladder() const { return ladder_; }

 private:
  int layer_for(double r_outer) const;
  double r_hat_;
  int n_theta_ = 0;
  std::vector<double> ladder_; // radii, ladder_[0] == r_hat
};

// Point location with a uniform background grid; barycentric output.
class TriangleLocator {
 public:
  explicit TriangleLocator(const TriMesh& mesh);
  // Returns triangle index or -1; fills barycentric coordinates on success.
  int locate(const Eigen::Vector2d& p, std::array<double, 3>& bary) const;

 private:
  const TriMesh& mesh_;
  Eigen::Vector2d lo_, hi_;
  double cell_ = 1;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> bins_;
};

} // namespace helm
