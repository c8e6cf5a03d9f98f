#include <doctest.h>

#include <cmath>
#include <limits>

#include "hapdrive/error.hpp"
#include "hapdrive/track.hpp"
#include "hapdrive/units.hpp"

using namespace hapdrive;
using namespace hapdrive::track;
using hapdrive::units::deg2rad;

namespace {

// Brute-force arc-length scan at 1 cm.
double dense_closest_s(const TrackPath& path, Point q)
{
    double best = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (double s = 0.0; s <= path.total_length(); s += 0.01) {
        const Point p = path.point_at(s);
        const double d = std::hypot(p.x - q.x, p.y - q.y);
        if (d < best) {
            best = d;
            best_s = s;
        }
    }
    return best_s;
}

}  // namespace

TEST_CASE("training paths")
{
    const TrackPath flat = build_training_path(0.0);
    CHECK(flat.total_length() == doctest::Approx(600.0));
    CHECK(flat.curvature_at(300.0) == 0.0);
    const Point end = flat.point_at(600.0);
    CHECK(end.x == doctest::Approx(600.0));
    CHECK(end.y == doctest::Approx(0.0));

    const TrackPath left = build_training_path(deg2rad(90.0));
    CHECK(left.segments()[1].radius == doctest::Approx(200.0 / (units::kPi / 2.0)).epsilon(1e-12));
    CHECK(left.curvature_at(300.0) > 0.0);
    CHECK(left.heading_at(600.0) == doctest::Approx(units::kPi / 2.0));

    const TrackPath right = build_training_path(deg2rad(-180.0));
    CHECK(right.segments()[1].radius == doctest::Approx(200.0 / units::kPi).epsilon(1e-12));
    CHECK(right.curvature_at(300.0) < 0.0);

    CHECK(training_sweeps_deg().size() == 25);
    CHECK_THROWS_AS(build_training_path(4.0), ConfigInvalid);
}

TEST_CASE("path is G1 continuous at joints")
{
    const TrackPath path = generate_random_path(7, 4000.0);
    for (std::size_t i = 1; i < path.segments().size(); ++i) {
        const double s = path.segment_s0(i);
        const Point a = path.point_at(s - 1e-7);
        const Point b = path.point_at(s + 1e-7);
        CHECK(std::hypot(a.x - b.x, a.y - b.y) < 1e-5);
        CHECK(std::abs(units::wrap_angle(path.heading_at(s - 1e-7) - path.heading_at(s + 1e-7))) < 1e-6);
    }
}

TEST_CASE("closest midline point")
{
    const TrackPath flat = build_training_path(0.0);
    PathQuery q = closest_midline_point(flat, {100.0, 0.0});
    CHECK(q.s == doctest::Approx(100.0));
    CHECK(q.distance == doctest::Approx(0.0));

    q = closest_midline_point(flat, {250.0, 1.0});
    CHECK(q.distance == doctest::Approx(1.0));
    CHECK(q.lateral == doctest::Approx(1.0));
    CHECK(q.tangent_heading == doctest::Approx(0.0));

    q = closest_midline_point(flat, {250.0, -1.5});
    CHECK(q.lateral == doctest::Approx(-1.5));

    CHECK_THROWS_AS(closest_midline_point(flat, {300.0, 500.0}), OutOfRange);

    SUBCASE("matches a dense scan near arc joints")
    {
        const TrackPath path = build_training_path(deg2rad(75.0));
        for (const Point p : {Point{199.0, 2.3}, Point{201.5, -1.2}, Point{205.0, 4.0}, Point{198.0, 0.7}}) {
            CHECK(std::abs(closest_midline_point(path, p).s - dense_closest_s(path, p)) < 0.01);
        }
        const double s_end = path.segment_s0(2);
        const Point joint = path.offset_point(s_end, 1.0);
        CHECK(std::abs(closest_midline_point(path, {joint.x + 0.3, joint.y}).s -
                       dense_closest_s(path, {joint.x + 0.3, joint.y})) < 0.01);
    }
}

TEST_CASE("boundary rays")
{
    const TrackPath flat = build_training_path(0.0);
    CHECK(boundary_ray_distance(flat, {100.0, 0.0, 0.0}, 0.0) == doctest::Approx(kRayCap));
    // Car on the first-lane midline, 1.75 m from the right edge, looking 30 deg toward it.
    CHECK(boundary_ray_distance(flat, {100.0, 0.0, 0.0}, deg2rad(-30.0)) == doctest::Approx(3.5).epsilon(1e-9));
    // Perpendicular into the left edge: 5.25 m from the first-lane midline.
    CHECK(boundary_ray_distance(flat, {100.0, 3.25, units::kPi / 2.0}, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(boundary_ray_distance(flat, {100.0, -3.0, 0.0}, 0.0), OutsideRoad);

    SUBCASE("agrees with a 1-cm march on an arc")
    {
        // Left turn of radius R centred at (200, R); road spans radii R - 5.25 .. R + 1.75.
        const TrackPath path = build_training_path(deg2rad(90.0));
        const double R = path.segments()[1].radius;
        const double a = deg2rad(30.0);
        const Pose pose{200.0 + R * std::sin(a), R - R * std::cos(a) + 0.4, a + deg2rad(3.0)};
        for (const double off_deg : kRayOffsetsDeg) {
            const double dir = pose.heading + deg2rad(off_deg);
            double d = 0.0;
            for (; d < kRayCap; d += 0.01) {
                const double x = pose.x + d * std::cos(dir);
                const double y = pose.y + d * std::sin(dir);
                const double r = std::hypot(x - 200.0, y - R);
                if (r > R + 1.75 || r < R - 5.25) {
                    break;
                }
            }
            CHECK(std::abs(boundary_ray_distance(path, pose, deg2rad(off_deg)) - std::min(d, kRayCap)) < 0.011);
        }
    }
}

TEST_CASE("random path rules")
{
    const TrackPath path = generate_random_path(42, 4000.0);
    CHECK(path.total_length() == doctest::Approx(4000.0).epsilon(1e-12));
    CHECK(path.segments().front().kind == SegmentKind::straight);
    CHECK(generate_random_path(42, 4000.0) == path);
    CHECK_FALSE(generate_random_path(43, 4000.0) == path);

    const TrackPath clear = pick_clear_random_path(1001, 4000.0);
    CHECK(self_clearance(clear, 2.0 * 60.0 + clear.left_edge_offset()) >= 60.0);
}

TEST_CASE("track text round trip")
{
    for (const std::uint64_t seed : {1u, 2u, 99u}) {
        const TrackPath path = generate_random_path(seed, 1234.5);
        const TrackPath back = from_text(to_text(path));
        CHECK(back == path);
        CHECK(to_text(back) == to_text(path));
    }
    CHECK_THROWS_AS(from_text("TRACK 1 3.5 0 0 0 0\nQ 12\n"), FormatError);
    CHECK_THROWS_AS(from_text("nope"), FormatError);
}
