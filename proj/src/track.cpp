#include "hapdrive/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hapdrive/error.hpp"
#include "hapdrive/text.hpp"
#include "hapdrive/units.hpp"

namespace hapdrive::units {

double wrap_angle(double rad)
{
    double a = std::remainder(rad, 2.0 * kPi);
    if (a <= -kPi) {
        a += 2.0 * kPi;
    }
    return a;
}

}  // namespace hapdrive::units

namespace hapdrive::track {

using units::deg2rad;
using units::kPi;
using units::rad2deg;
using units::wrap_angle;

Segment Segment::straight(double length)
{
    Segment s;
    s.kind = SegmentKind::straight;
    s.length = length;
    return s;
}

Segment Segment::arc(double radius, double sweep_deg)
{
    Segment s;
    s.kind = SegmentKind::arc;
    s.radius = radius;
    s.sweep_deg = sweep_deg;
    return s;
}

double Segment::arc_length() const
{
    return kind == SegmentKind::straight ? length : radius * std::abs(sweep_rad());
}

double Segment::sweep_rad() const { return deg2rad(sweep_deg); }

double Segment::curvature() const
{
    if (kind == SegmentKind::straight) {
        return 0.0;
    }
    return (sweep_deg > 0.0 ? 1.0 : -1.0) / radius;
}

namespace {

void validate(const Segment& seg)
{
    if (seg.kind == SegmentKind::straight) {
        if (!(seg.length > 0.0) || !std::isfinite(seg.length)) {
            throw ConfigInvalid("straight segment needs a positive length");
        }
    } else {
        if (!(seg.radius > 0.0) || !std::isfinite(seg.radius)) {
            throw ConfigInvalid("arc segment needs a positive radius");
        }
        if (seg.sweep_deg == 0.0 || !std::isfinite(seg.sweep_deg) || std::abs(seg.sweep_deg) > 360.0) {
            throw ConfigInvalid("arc segment needs a non-zero sweep within one turn");
        }
    }
}

double dist2(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

Point arc_center(const Pose& p0, double k)
{
    return {p0.x - std::sin(p0.heading) / k, p0.y + std::cos(p0.heading) / k};
}

// Arc length (from the segment start) of the point on an arc whose radial
// direction matches q, with the angle chosen in the window centred on the arc.
double arc_param_unclamped(const Segment& seg, const Pose& p0, Point q)
{
    const double k = seg.curvature();
    const Point c = arc_center(p0, k);
    const double sgn = k > 0.0 ? 1.0 : -1.0;
    const double h = std::atan2(q.y - c.y, q.x - c.x) + sgn * 0.5 * kPi;
    const double half = 0.5 * seg.sweep_rad();
    const double rel = half + wrap_angle(h - p0.heading - half);
    return rel / k;
}

}  // namespace

TrackPath::TrackPath(std::vector<Segment> segments, double lane_width, Pose start, std::uint64_t seed)
    : segments_(std::move(segments)), lane_width_(lane_width), start_(start), seed_(seed)
{
    if (segments_.empty()) {
        throw ConfigInvalid("a path needs at least one segment");
    }
    if (!(lane_width_ > 0.0) || !std::isfinite(lane_width_)) {
        throw ConfigInvalid("lane width must be positive");
    }
    seg_start_.reserve(segments_.size());
    seg_s0_.reserve(segments_.size());
    Pose pose = start_;
    double s = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        validate(segments_[i]);
        if (segments_[i].kind == SegmentKind::arc &&
            segments_[i].radius <= left_edge_offset()) {
            throw ConfigInvalid("arc radius is smaller than the road half-width");
        }
        seg_start_.push_back(pose);
        seg_s0_.push_back(s);
        const double len = segments_[i].arc_length();
        pose = local_pose(i, len);
        s += len;
    }
    total_length_ = s;
}

Pose TrackPath::local_pose(std::size_t i, double ds) const
{
    const Segment& seg = segments_[i];
    const Pose& p0 = seg_start_[i];
    if (seg.kind == SegmentKind::straight) {
        return {p0.x + ds * std::cos(p0.heading), p0.y + ds * std::sin(p0.heading), p0.heading};
    }
    const double k = seg.curvature();
    const double h = p0.heading + k * ds;
    return {p0.x + (std::sin(h) - std::sin(p0.heading)) / k,
            p0.y - (std::cos(h) - std::cos(p0.heading)) / k, h};
}

std::size_t TrackPath::segment_index(double s) const
{
    if (s <= 0.0) {
        return 0;
    }
    const auto it = std::upper_bound(seg_s0_.begin(), seg_s0_.end(), s);
    return static_cast<std::size_t>(std::distance(seg_s0_.begin(), it)) - 1;
}

Pose TrackPath::pose_at(double s) const
{
    if (s < 0.0) {
        const Pose& p0 = seg_start_.front();
        return {p0.x + s * std::cos(p0.heading), p0.y + s * std::sin(p0.heading), p0.heading};
    }
    if (s > total_length_) {
        const Pose end = local_pose(segments_.size() - 1, segments_.back().arc_length());
        const double ds = s - total_length_;
        return {end.x + ds * std::cos(end.heading), end.y + ds * std::sin(end.heading), end.heading};
    }
    const std::size_t i = segment_index(s);
    return local_pose(i, std::min(s - seg_s0_[i], segments_[i].arc_length()));
}

Point TrackPath::point_at(double s) const
{
    const Pose p = pose_at(s);
    return {p.x, p.y};
}

double TrackPath::heading_at(double s) const { return pose_at(s).heading; }

double TrackPath::curvature_at(double s) const
{
    if (s < 0.0 || s > total_length_) {
        return 0.0;
    }
    return segments_[segment_index(s)].curvature();
}

Point TrackPath::offset_point(double s, double n) const
{
    const Pose p = pose_at(s);
    return {p.x - n * std::sin(p.heading), p.y + n * std::cos(p.heading)};
}

bool TrackPath::operator==(const TrackPath& other) const
{
    return segments_ == other.segments_ && lane_width_ == other.lane_width_ &&
           start_.x == other.start_.x && start_.y == other.start_.y &&
           start_.heading == other.start_.heading && seed_ == other.seed_;
}

TrackPath build_training_path(double phi_rad)
{
    if (!(std::abs(phi_rad) <= kPi)) {
        throw ConfigInvalid("training sweep must lie in [-pi, pi]");
    }
    constexpr double kPart = 200.0;
    std::vector<Segment> segs;
    segs.push_back(Segment::straight(kPart));
    if (phi_rad == 0.0) {
        segs.push_back(Segment::straight(kPart));
    } else {
        segs.push_back(Segment::arc(kPart / std::abs(phi_rad), rad2deg(phi_rad)));
    }
    segs.push_back(Segment::straight(kPart));
    return TrackPath(std::move(segs));
}

std::vector<double> training_sweeps_deg()
{
    std::vector<double> out;
    for (int d = -180; d <= 180; d += 15) {
        out.push_back(static_cast<double>(d));
    }
    return out;
}

TrackPath generate_random_path(std::uint64_t seed, double target_length, const RandomPathRules& rules)
{
    if (!(target_length > 0.0)) {
        throw ConfigInvalid("target length must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    enum class Next { straight, left, right };
    Next next = Next::straight;
    std::vector<Segment> segs;
    double cum = 0.0;
    while (true) {
        Segment seg;
        if (next == Next::straight) {
            seg = Segment::straight(uniform(rules.min_length, rules.max_length));
        } else {
            const double radius = uniform(rules.min_radius, rules.max_radius);
            const double sweep = uniform(rules.min_sweep_deg, rules.max_sweep_deg);
            seg = Segment::arc(radius, next == Next::left ? sweep : -sweep);
        }
        const double len = seg.arc_length();
        if (cum + len >= target_length) {
            const double remaining = target_length - cum;
            if (seg.kind == SegmentKind::straight) {
                seg.length = remaining;
            } else {
                seg.sweep_deg = std::copysign(rad2deg(remaining / seg.radius), seg.sweep_deg);
            }
            segs.push_back(seg);
            break;
        }
        segs.push_back(seg);
        cum += len;

        if (next == Next::straight) {
            next = unit(rng) < 0.5 ? Next::left : Next::right;
        } else if (unit(rng) < rules.p_curve_to_straight) {
            next = Next::straight;
        } else {
            next = next == Next::left ? Next::right : Next::left;
        }
    }
    return TrackPath(std::move(segs), TrackPath::kDefaultLaneWidth, Pose{}, seed);
}

double self_clearance(const TrackPath& path, double min_separation, double step)
{
    const double total = path.total_length();
    const auto n = static_cast<std::size_t>(std::ceil(total / step)) + 1;
    std::vector<Point> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = path.point_at(std::min(total, static_cast<double>(i) * step));
    }
    const auto gap = static_cast<std::size_t>(std::ceil(min_separation / step));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + gap; j < n; ++j) {
            best = std::min(best, dist2(pts[i], pts[j]));
        }
    }
    return std::sqrt(best);
}

TrackPath pick_clear_random_path(std::uint64_t base_seed, double target_length, double clearance)
{
    for (std::uint64_t seed = base_seed; seed < base_seed + 10000; ++seed) {
        TrackPath path = generate_random_path(seed, target_length);
        // Road width plus the ray range keeps distant road parts out of view.
        if (self_clearance(path, 2.0 * clearance + path.left_edge_offset()) >= clearance) {
            return path;
        }
    }
    throw ConfigInvalid("no self-clear random path found");
}

PathQuery closest_midline_point(const TrackPath& path, Point q, double max_distance)
{
    const auto& segs = path.segments();
    double best_d2 = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Segment& seg = segs[i];
        const Pose& p0 = path.segment_start(i);
        const double len = seg.arc_length();
        double ds = 0.0;
        if (seg.kind == SegmentKind::straight) {
            const double t = (q.x - p0.x) * std::cos(p0.heading) + (q.y - p0.y) * std::sin(p0.heading);
            ds = std::clamp(t, 0.0, len);
        } else {
            ds = std::clamp(arc_param_unclamped(seg, p0, q), 0.0, len);
        }
        // Endpoints are checked too, so a clamped projection can never hide a closer end.
        for (const double cand : {ds, 0.0, len}) {
            const double s = path.segment_s0(i) + cand;
            const double d2 = dist2(path.point_at(s), q);
            if (d2 < best_d2) {
                best_d2 = d2;
                best_s = s;
            }
        }
    }
    const double dist = std::sqrt(best_d2);
    if (!(dist <= max_distance)) {
        throw OutOfRange("position is farther than the query bound from the path");
    }
    PathQuery out;
    out.s = std::min(best_s, path.total_length());
    const Pose p = path.pose_at(out.s);
    out.point = {p.x, p.y};
    out.tangent_heading = p.heading;
    out.curvature = path.curvature_at(out.s);
    out.lateral = -(q.x - p.x) * std::sin(p.heading) + (q.y - p.y) * std::cos(p.heading);
    out.distance = dist;
    return out;
}

namespace {

// Smallest t > 0 where the ray hits the boundary curve at lateral offset n of segment i.
double ray_hit(const TrackPath& path, std::size_t i, double n, Point o, Point u)
{
    constexpr double kEps = 1e-9;
    const Segment& seg = path.segments()[i];
    const Pose& p0 = path.segment_start(i);
    const double len = seg.arc_length();
    double best = std::numeric_limits<double>::infinity();
    if (seg.kind == SegmentKind::straight) {
        const double tx = std::cos(p0.heading);
        const double ty = std::sin(p0.heading);
        const Point a{p0.x - n * ty, p0.y + n * tx};
        // o + t u = a + lambda tdir
        const double den = u.x * ty - u.y * tx;
        if (std::abs(den) < 1e-15) {
            return best;
        }
        const double dx = a.x - o.x;
        const double dy = a.y - o.y;
        const double t = (dx * ty - dy * tx) / den;
        const double lambda = (dx * u.y - dy * u.x) / den;
        if (t > kEps && lambda >= -kEps && lambda <= len + kEps) {
            best = t;
        }
        return best;
    }
    const double k = seg.curvature();
    const Point c = arc_center(p0, k);
    const double rho = seg.radius - n * (k > 0.0 ? 1.0 : -1.0);
    if (rho <= 0.0) {
        return best;
    }
    const double wx = o.x - c.x;
    const double wy = o.y - c.y;
    const double b = u.x * wx + u.y * wy;
    const double cc = wx * wx + wy * wy - rho * rho;
    const double disc = b * b - cc;
    if (disc < 0.0) {
        return best;
    }
    const double root = std::sqrt(disc);
    for (const double t : {-b - root, -b + root}) {
        if (t <= kEps || t >= best) {
            continue;
        }
        const Point h{o.x + t * u.x, o.y + t * u.y};
        const double ds = arc_param_unclamped(seg, p0, h);
        if (ds >= -kEps && ds <= len + kEps) {
            best = t;
        }
    }
    return best;
}

}  // namespace

double boundary_ray_distance(const TrackPath& path, const Pose& pose, double offset_rad)
{
    const PathQuery q = closest_midline_point(path, {pose.x, pose.y});
    if (q.lateral < path.right_edge_offset() || q.lateral > path.left_edge_offset()) {
        throw OutsideRoad("pose is outside the road surface");
    }
    const double dir = pose.heading + offset_rad;
    const Point u{std::cos(dir), std::sin(dir)};
    const Point o{pose.x, pose.y};
    double best = kRayCap;
    for (std::size_t i = 0; i < path.segments().size(); ++i) {
        for (const double n : {path.right_edge_offset(), path.left_edge_offset()}) {
            best = std::min(best, ray_hit(path, i, n, o, u));
        }
    }
    return best;
}

std::string to_text(const TrackPath& path)
{
    std::string out = "TRACK 1 ";
    text::append_double(out, path.lane_width());
    out += ' ';
    out += std::to_string(path.seed());
    for (const double v : {path.start_pose().x, path.start_pose().y, path.start_pose().heading}) {
        out += ' ';
        text::append_double(out, v);
    }
    out += '\n';
    for (const Segment& seg : path.segments()) {
        if (seg.kind == SegmentKind::straight) {
            out += "S ";
            text::append_double(out, seg.length);
        } else {
            out += "A ";
            text::append_double(out, seg.radius);
            out += ' ';
            text::append_double(out, seg.sweep_deg);
        }
        out += '\n';
    }
    return out;
}

TrackPath from_text(std::string_view body)
{
    const auto lines = text::split(body, '\n');
    bool have_header = false;
    double lane_width = TrackPath::kDefaultLaneWidth;
    std::uint64_t seed = 0;
    Pose start;
    std::vector<Segment> segs;
    for (const auto line : lines) {
        const auto tok = text::split_whitespace(line);
        if (tok.empty() || tok[0].starts_with('#')) {
            continue;
        }
        if (!have_header) {
            if (tok.size() != 7 || tok[0] != "TRACK" || tok[1] != "1") {
                throw FormatError("expected 'TRACK 1 <lane_width> <seed> <x0> <y0> <heading0>' header");
            }
            lane_width = text::parse_double(tok[2]);
            seed = static_cast<std::uint64_t>(std::stoull(std::string(tok[3])));
            start = {text::parse_double(tok[4]), text::parse_double(tok[5]), text::parse_double(tok[6])};
            have_header = true;
            continue;
        }
        if (tok[0] == "S" && tok.size() == 2) {
            segs.push_back(Segment::straight(text::parse_double(tok[1])));
        } else if (tok[0] == "A" && tok.size() == 3) {
            segs.push_back(Segment::arc(text::parse_double(tok[1]), text::parse_double(tok[2])));
        } else {
            throw FormatError("bad segment line: '" + std::string(line) + "'");
        }
    }
    if (!have_header) {
        throw FormatError("missing track header");
    }
    return TrackPath(std::move(segs), lane_width, start, seed);
}

}  // namespace hapdrive::track
