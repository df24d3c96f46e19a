#include "elastic_flow/curve.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace elastic_flow {

DiscreteCurve::DiscreteCurve(std::vector<Point2> nodes, Topology topology)
    : nodes_(std::move(nodes)), topology_(topology) {
  const std::size_t n = segments();
  if (nodes_.size() < 2 || n < kMinSegments) {
    throw BadParams(fmt::format("curve needs at least {} segments, got {}", kMinSegments,
                                nodes_.size() < 2 ? 0 : n));
  }
  for (const Point2& p : nodes_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw BadParams("curve node has a non-finite coordinate");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(segment_length(i) > 0.0)) {
      throw DegenerateCurve(fmt::format("segment {} has zero length", i));
    }
  }
}

DiscreteCurve DiscreteCurve::open(std::vector<Point2> nodes) {
  return DiscreteCurve(std::move(nodes), Topology::open);
}

DiscreteCurve DiscreteCurve::closed(std::vector<Point2> nodes) {
  return DiscreteCurve(std::move(nodes), Topology::closed);
}

double DiscreteCurve::segment_length(std::size_t i) const {
  const std::size_t j = (i + 1) % nodes_.size();
  return norm(nodes_[j] - nodes_[i]);
}

double DiscreteCurve::min_segment_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segments(); ++i) m = std::min(m, segment_length(i));
  return m;
}

double DiscreteCurve::max_segment_length() const {
  double m = 0.0;
  for (std::size_t i = 0; i < segments(); ++i) m = std::max(m, segment_length(i));
  return m;
}

double DiscreteCurve::total_length() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < segments(); ++i) sum += segment_length(i);
  return sum;
}

}  // namespace elastic_flow
