#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace elastic_flow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;

  Point2& operator+=(Point2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
/// Counterclockwise rotation by pi/2.
inline Point2 rotate_ccw(Point2 a) { return {-a.y, a.x}; }

class DegenerateCurve : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Open curves carry pinned endpoints; closed curves exist only so stencils
/// can be checked against circles and are never evolved.
enum class Topology { open, closed };

inline constexpr std::size_t kMinSegments = 16;

/// Polyline sample of an immersed plane curve on a uniform parameter grid.
///
/// Open curves store n+1 nodes with nodes[0] = P and nodes[n] = Q. Closed
/// curves store n distinct nodes and an implicit wrap-around segment.
/// Self-intersections are allowed and never checked.
class DiscreteCurve {
 public:
  static DiscreteCurve open(std::vector<Point2> nodes);
  static DiscreteCurve closed(std::vector<Point2> nodes);

  std::span<const Point2> nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  /// Number of segments n.
  std::size_t segments() const {
    return topology_ == Topology::open ? nodes_.size() - 1 : nodes_.size();
  }
  Topology topology() const { return topology_; }
  bool is_open() const { return topology_ == Topology::open; }

  Point2 endpoint_p() const { return nodes_.front(); }
  Point2 endpoint_q() const { return nodes_.back(); }

  double segment_length(std::size_t i) const;
  double min_segment_length() const;
  double max_segment_length() const;
  double total_length() const;

 private:
  DiscreteCurve(std::vector<Point2> nodes, Topology topology);

  std::vector<Point2> nodes_;
  Topology topology_;
};

}  // namespace elastic_flow
