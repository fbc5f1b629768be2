#include "chordmc/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace chordmc {

namespace {

class SphereBody final : public Body {
public:
    SphereBody(const Vec3& c, double r) : center_(c), radius_(r) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("sphere radius must be positive and finite");
        bounds_ = {c, r};
    }

    void line_crossings(const Line& line, CrossingList& out) const override {
        out.clear();
        Vec3 m = line.anchor - center_;
        double b = dot(m, line.dir);
        double c = norm2(m) - radius_ * radius_;
        double disc = b * b - c;
        if (disc < 0.0) return;
        double s = std::sqrt(disc);
        out.push_back(-b - s);
        out.push_back(-b + s);
    }

    bool contains(const Vec3& p) const override {
        return norm2(p - center_) <= radius_ * radius_;
    }

    std::optional<double> analytic_volume() const override {
        return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_;
    }
    std::optional<double> analytic_area() const override {
        return 4.0 * kPi * radius_ * radius_;
    }

private:
    Vec3 center_;
    double radius_;
};

class BoxBody final : public Body {
public:
    BoxBody(const Vec3& lo, const Vec3& hi) : lo_(lo), hi_(hi) {
        for (int i = 0; i < 3; ++i)
            if (!(lo[i] < hi[i]))
                throw std::invalid_argument("box must have lo < hi on every axis");
        bounds_ = {(lo + hi) * 0.5, 0.5 * norm(hi - lo)};
    }

    void line_crossings(const Line& line, CrossingList& out) const override {
        out.clear();
        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
            double a = line.anchor[i], d = line.dir[i];
            if (d == 0.0) {
                if (a < lo_[i] || a > hi_[i]) return;
                continue;
            }
            double inv = 1.0 / d;
            double ta = (lo_[i] - a) * inv;
            double tb = (hi_[i] - a) * inv;
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return;
        }
        if (!std::isfinite(t0) || !std::isfinite(t1)) return;  // line inside a face plane
        out.push_back(t0);
        out.push_back(t1);
    }

    bool contains(const Vec3& p) const override {
        for (int i = 0; i < 3; ++i)
            if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
        return true;
    }

    std::optional<double> analytic_volume() const override {
        Vec3 e = hi_ - lo_;
        return e.x * e.y * e.z;
    }
    std::optional<double> analytic_area() const override {
        Vec3 e = hi_ - lo_;
        return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
    }

private:
    Vec3 lo_, hi_;
};

class CylinderBody final : public Body {
public:
    CylinderBody(const Vec3& p0, const Vec3& p1, double r) : base_(p0), radius_(r) {
        Vec3 ax = p1 - p0;
        height_ = norm(ax);
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("cylinder radius must be positive and finite");
        if (!(height_ > 0.0))
            throw std::invalid_argument("cylinder axis endpoints must be distinct");
        axis_ = ax / height_;
        bounds_ = {p0 + ax * 0.5, std::sqrt(0.25 * height_ * height_ + r * r)};
    }

    void line_crossings(const Line& line, CrossingList& out) const override {
        out.clear();
        Vec3 m = line.anchor - base_;
        double mu = dot(m, axis_);
        double du = dot(line.dir, axis_);
        Vec3 mp = m - axis_ * mu;
        Vec3 dp = line.dir - axis_ * du;

        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();

        // infinite cylinder
        double a = norm2(dp);
        if (a > 0.0) {
            double b = dot(mp, dp);
            double c = norm2(mp) - radius_ * radius_;
            double disc = b * b - a * c;
            if (disc < 0.0) return;
            double s = std::sqrt(disc);
            t0 = (-b - s) / a;
            t1 = (-b + s) / a;
        } else if (norm2(mp) > radius_ * radius_) {
            return;  // parallel to the axis, outside the shell
        }

        // cap slab: 0 <= mu + t*du <= height
        if (du == 0.0) {
            if (mu < 0.0 || mu > height_) return;
        } else {
            double ta = (0.0 - mu) / du;
            double tb = (height_ - mu) / du;
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
        }
        if (t0 > t1 || !std::isfinite(t0) || !std::isfinite(t1)) return;
        out.push_back(t0);
        out.push_back(t1);
    }

    bool contains(const Vec3& p) const override {
        Vec3 m = p - base_;
        double mu = dot(m, axis_);
        if (mu < 0.0 || mu > height_) return false;
        return norm2(m - axis_ * mu) <= radius_ * radius_;
    }

    std::optional<double> analytic_volume() const override {
        return kPi * radius_ * radius_ * height_;
    }
    std::optional<double> analytic_area() const override {
        return 2.0 * kPi * radius_ * (radius_ + height_);
    }

private:
    Vec3 base_, axis_;
    double radius_, height_;
};

// ---- interval algebra for CSG crossing lists ----
//
// A crossing list decomposes into proper in-body intervals plus isolated
// tangent points. Booleans are computed on the proper intervals with
// regularized (closed-solid) semantics; tangent points are carried through
// and re-emitted as duplicated crossings where they remain boundary contacts.

using Interval = std::pair<double, double>;

struct IntervalSet {
    std::vector<Interval> iv;     // disjoint, sorted, lo < hi
    std::vector<double> tangent;  // isolated contact points
};

IntervalSet to_intervals(const CrossingList& xs) {
    IntervalSet s;
    for (size_t i = 0; i + 1 < xs.size(); i += 2) {
        if (xs[i] == xs[i + 1])
            s.tangent.push_back(xs[i]);
        else
            s.iv.emplace_back(xs[i], xs[i + 1]);
    }
    return s;
}

bool covered_closed(const std::vector<Interval>& iv, double t) {
    for (const auto& [lo, hi] : iv) {
        if (t < lo) return false;
        if (t <= hi) return true;
    }
    return false;
}

bool covered_open(const std::vector<Interval>& iv, double t) {
    for (const auto& [lo, hi] : iv) {
        if (t <= lo) return false;
        if (t < hi) return true;
    }
    return false;
}

bool in_closed_set(const IntervalSet& s, double t) {
    if (covered_closed(s.iv, t)) return true;
    return std::find(s.tangent.begin(), s.tangent.end(), t) != s.tangent.end();
}

std::vector<Interval> union_iv(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    std::vector<Interval> all;
    all.reserve(a.size() + b.size());
    all.insert(all.end(), a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::vector<Interval> out;
    for (const auto& it : all) {
        if (!out.empty() && it.first <= out.back().second)
            out.back().second = std::max(out.back().second, it.second);
        else
            out.push_back(it);
    }
    return out;
}

void intersect_iv(const std::vector<Interval>& a, const std::vector<Interval>& b,
                  std::vector<Interval>& out, std::vector<double>& touch) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double lo = std::max(a[i].first, b[j].first);
        double hi = std::min(a[i].second, b[j].second);
        if (lo < hi)
            out.emplace_back(lo, hi);
        else if (lo == hi)
            touch.push_back(lo);
        if (a[i].second < b[j].second)
            ++i;
        else if (a[i].second > b[j].second)
            ++j;
        else {
            ++i;
            ++j;
        }
    }
}

std::vector<Interval> difference_iv(const std::vector<Interval>& a,
                                    const std::vector<Interval>& b) {
    std::vector<Interval> out;
    size_t j = 0;
    for (const auto& ai : a) {
        double curlo = ai.first;
        while (j < b.size() && b[j].second <= ai.first) ++j;
        for (size_t k = j; k < b.size() && b[k].first < ai.second; ++k) {
            if (b[k].second <= curlo) continue;
            if (b[k].first > curlo) out.emplace_back(curlo, b[k].first);
            curlo = std::max(curlo, b[k].second);
            if (curlo >= ai.second) break;
        }
        if (curlo < ai.second) out.emplace_back(curlo, ai.second);
    }
    return out;
}

enum class BoolOp { Union, Intersection, Difference };

void combine(BoolOp op, const CrossingList& ca, const CrossingList& cb, CrossingList& out) {
    IntervalSet a = to_intervals(ca);
    IntervalSet b = to_intervals(cb);
    std::vector<Interval> riv;
    std::vector<double> rt;

    switch (op) {
    case BoolOp::Union:
        riv = union_iv(a.iv, b.iv);
        for (double t : a.tangent)
            if (!covered_closed(riv, t)) rt.push_back(t);
        for (double t : b.tangent)
            if (!covered_closed(riv, t)) rt.push_back(t);
        break;
    case BoolOp::Intersection: {
        std::vector<double> touch;
        intersect_iv(a.iv, b.iv, riv, touch);
        for (double t : a.tangent)
            if (in_closed_set(b, t)) rt.push_back(t);
        for (double t : b.tangent)
            if (in_closed_set(a, t) && std::find(rt.begin(), rt.end(), t) == rt.end())
                rt.push_back(t);
        rt.insert(rt.end(), touch.begin(), touch.end());
        break;
    }
    case BoolOp::Difference:
        riv = difference_iv(a.iv, b.iv);
        for (double t : a.tangent)
            if (!covered_open(b.iv, t)) rt.push_back(t);
        break;
    }

    std::sort(rt.begin(), rt.end());
    rt.erase(std::unique(rt.begin(), rt.end()), rt.end());

    out.clear();
    size_t ii = 0, ti = 0;
    while (ii < riv.size() || ti < rt.size()) {
        if (ti >= rt.size() || (ii < riv.size() && riv[ii].first <= rt[ti])) {
            out.push_back(riv[ii].first);
            out.push_back(riv[ii].second);
            ++ii;
        } else {
            // skip tangents that coincide with an interval boundary
            if (!covered_closed(riv, rt[ti])) {
                out.push_back(rt[ti]);
                out.push_back(rt[ti]);
            }
            ++ti;
        }
    }
    // tangents that landed inside the emitted sequence keep it sorted only if
    // intervals are disjoint from them; enforce by a final sort
    std::sort(out.begin(), out.end());
}

class CsgBody final : public Body {
public:
    CsgBody(BoolOp op, BodyPtr a, BodyPtr b) : op_(op), a_(std::move(a)), b_(std::move(b)) {
        if (!a_ || !b_) throw std::invalid_argument("CSG operands must be non-null");
        switch (op_) {
        case BoolOp::Union:
            bounds_ = enclosing_sphere(a_->bounds(), b_->bounds());
            break;
        case BoolOp::Intersection:
            bounds_ = a_->bounds().radius <= b_->bounds().radius ? a_->bounds() : b_->bounds();
            break;
        case BoolOp::Difference:
            bounds_ = a_->bounds();
            break;
        }
    }

    void line_crossings(const Line& line, CrossingList& out) const override {
        CrossingList ca, cb;
        a_->line_crossings(line, ca);
        b_->line_crossings(line, cb);
        combine(op_, ca, cb, out);
    }

    bool contains(const Vec3& p) const override {
        switch (op_) {
        case BoolOp::Union: return a_->contains(p) || b_->contains(p);
        case BoolOp::Intersection: return a_->contains(p) && b_->contains(p);
        case BoolOp::Difference: return a_->contains(p) && !b_->contains(p);
        }
        return false;
    }

    std::optional<double> analytic_volume() const override {
        bool disjoint = spheres_disjoint();
        auto va = a_->analytic_volume();
        auto vb = b_->analytic_volume();
        switch (op_) {
        case BoolOp::Union:
            if (disjoint && va && vb) return *va + *vb;
            return std::nullopt;
        case BoolOp::Intersection:
            if (disjoint) return 0.0;
            return std::nullopt;
        case BoolOp::Difference:
            if (disjoint && va) return *va;
            return std::nullopt;
        }
        return std::nullopt;
    }

    std::optional<double> analytic_area() const override {
        bool disjoint = spheres_disjoint();
        auto sa = a_->analytic_area();
        auto sb = b_->analytic_area();
        switch (op_) {
        case BoolOp::Union:
            if (disjoint && sa && sb) return *sa + *sb;
            return std::nullopt;
        case BoolOp::Intersection:
            if (disjoint) return 0.0;
            return std::nullopt;
        case BoolOp::Difference:
            if (disjoint && sa) return *sa;
            return std::nullopt;
        }
        return std::nullopt;
    }

private:
    bool spheres_disjoint() const {
        const auto& sa = a_->bounds();
        const auto& sb = b_->bounds();
        return norm(sa.center - sb.center) >= sa.radius + sb.radius;
    }

    BoolOp op_;
    BodyPtr a_, b_;
};

class TransformedBody final : public Body {
public:
    // world point = rot * local + offset
    TransformedBody(BodyPtr child, const Rotation& rot, const Vec3& offset)
        : child_(std::move(child)), rot_(rot), offset_(offset) {
        if (!child_) throw std::invalid_argument("transformed child must be non-null");
        bounds_ = {rot_.apply(child_->bounds().center) + offset_, child_->bounds().radius};
    }

    void line_crossings(const Line& line, CrossingList& out) const override {
        Line local{rot_.apply_inverse(line.anchor - offset_), rot_.apply_inverse(line.dir)};
        child_->line_crossings(local, out);  // rigid motion leaves t unchanged
    }

    bool contains(const Vec3& p) const override {
        return child_->contains(rot_.apply_inverse(p - offset_));
    }

    std::optional<double> analytic_volume() const override { return child_->analytic_volume(); }
    std::optional<double> analytic_area() const override { return child_->analytic_area(); }

private:
    BodyPtr child_;
    Rotation rot_;
    Vec3 offset_;
};

}  // namespace

BodyPtr make_sphere(const Vec3& center, double radius) {
    return std::make_shared<SphereBody>(center, radius);
}
BodyPtr make_box(const Vec3& lo, const Vec3& hi) {
    return std::make_shared<BoxBody>(lo, hi);
}
BodyPtr make_cylinder(const Vec3& p0, const Vec3& p1, double radius) {
    return std::make_shared<CylinderBody>(p0, p1, radius);
}
BodyPtr make_union(BodyPtr a, BodyPtr b) {
    return std::make_shared<CsgBody>(BoolOp::Union, std::move(a), std::move(b));
}
BodyPtr make_intersection(BodyPtr a, BodyPtr b) {
    return std::make_shared<CsgBody>(BoolOp::Intersection, std::move(a), std::move(b));
}
BodyPtr make_difference(BodyPtr a, BodyPtr b) {
    return std::make_shared<CsgBody>(BoolOp::Difference, std::move(a), std::move(b));
}
BodyPtr translate(BodyPtr b, const Vec3& offset) {
    return std::make_shared<TransformedBody>(std::move(b), Rotation{}, offset);
}
BodyPtr rotate(BodyPtr b, const Vec3& axis, double angle_rad, const Vec3& pivot) {
    Rotation r = Rotation::axis_angle(axis, angle_rad);
    Vec3 offset = pivot - r.apply(pivot);
    return std::make_shared<TransformedBody>(std::move(b), r, offset);
}

CrossingList intersect_line(const Body& body, const Line& line) {
    CrossingList out;
    body.line_crossings(line, out);
    if (out.size() % 2 != 0)
        throw std::logic_error("crossing list has odd length");
    double eps = 1e-9 * body.bounds().radius;
    for (size_t i = 0; i + 1 < out.size(); ++i) {
        if (out[i + 1] != out[i] && out[i + 1] - out[i] < eps) {
            double mid = 0.5 * (out[i] + out[i + 1]);
            out[i] = out[i + 1] = mid;
            ++i;
        }
    }
    return out;
}

std::optional<CrossingList> intersect_ray(const Body& body, const Vec3& origin, const Vec3& dir) {
    CrossingList all = intersect_line(body, Line{origin, dir});
    double eps = 1e-9 * body.bounds().radius;
    CrossingList pos;
    pos.reserve(all.size());
    for (double t : all) {
        if (std::abs(t) <= eps) return std::nullopt;  // origin on the boundary
        if (t > 0.0) pos.push_back(t);
    }
    if (pos.empty() || pos.size() % 2 == 0) return std::nullopt;  // origin not strictly inside
    return pos;
}

std::optional<double> surface_area(const Body& body) { return body.analytic_area(); }

}  // namespace chordmc
