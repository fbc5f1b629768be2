#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "chordmc/geom.hpp"

namespace chordmc {

// Sorted parameters at which a line crosses a solid's boundary. Always of
// even length; a tangent contact appears as a duplicated value, so the
// consecutive pairs (t[2k], t[2k+1]) are exactly the in-body intervals.
using CrossingList = std::vector<double>;

class Body;
using BodyPtr = std::shared_ptr<const Body>;

// Immutable CSG solid. Construction validates parameters; after that a Body
// is safe to share read-only across any number of threads.
class Body {
public:
    virtual ~Body() = default;

    // Raw crossing parameters of the infinite line, sorted, even count.
    // Tangency canonicalization happens in intersect_line().
    virtual void line_crossings(const Line& line, CrossingList& out) const = 0;

    virtual bool contains(const Vec3& p) const = 0;

    virtual std::optional<double> analytic_volume() const = 0;
    virtual std::optional<double> analytic_area() const = 0;

    const BoundingSphere& bounds() const { return bounds_; }

protected:
    BoundingSphere bounds_;
};

BodyPtr make_sphere(const Vec3& center, double radius);
BodyPtr make_box(const Vec3& lo, const Vec3& hi);
BodyPtr make_cylinder(const Vec3& p0, const Vec3& p1, double radius);
BodyPtr make_union(BodyPtr a, BodyPtr b);
BodyPtr make_intersection(BodyPtr a, BodyPtr b);
BodyPtr make_difference(BodyPtr a, BodyPtr b);
BodyPtr translate(BodyPtr b, const Vec3& offset);
BodyPtr rotate(BodyPtr b, const Vec3& axis, double angle_rad, const Vec3& pivot = {});

// All boundary crossings of the line with the body, sorted ascending.
// Crossings closer than 1e-9 x bounding radius are merged into an exact
// duplicated (tangent) pair.
CrossingList intersect_line(const Body& body, const Line& line);

// Positive-side crossings for a ray from an interior origin: the odd-length
// list l1 < l2 < ... of boundary distances. Returns nullopt when the origin
// sits on the boundary within tolerance (rejected sample) or when the
// positive crossing count is not odd.
std::optional<CrossingList> intersect_ray(const Body& body, const Vec3& origin, const Vec3& dir);

std::optional<double> surface_area(const Body& body);

}  // namespace chordmc
