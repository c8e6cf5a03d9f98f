#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hapdrive::track {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // rad, CCW from +x
};

enum class SegmentKind { straight, arc };

/// One piece of the first-lane midline. Arcs keep their sweep in degrees
/// so that the text form round-trips exactly; positive sweep turns left.
struct Segment {
    SegmentKind kind = SegmentKind::straight;
    double length = 0.0;     // straight only, m
    double radius = 0.0;     // arc only, m
    double sweep_deg = 0.0;  // arc only, signed

    static Segment straight(double length);
    static Segment arc(double radius, double sweep_deg);

    double arc_length() const;
    double sweep_rad() const;
    /// Signed curvature, 1/m; zero on straights.
    double curvature() const;

    bool operator==(const Segment&) const = default;
};

struct PathQuery {
    double s = 0.0;                // arc length along the first-lane midline
    Point point;                   // midline point at s
    double tangent_heading = 0.0;  // rad
    double curvature = 0.0;        // signed, 1/m
    double lateral = 0.0;          // signed offset of the query position, left positive
    double distance = 0.0;         // |lateral| for interior feet
};

/// Two-lane road described by the midline of its first (right) lane.
/// Immutable after construction.
class TrackPath {
public:
    static constexpr int kNumLanes = 2;
    static constexpr double kDefaultLaneWidth = 3.5;

    TrackPath(std::vector<Segment> segments, double lane_width = kDefaultLaneWidth,
              Pose start = {}, std::uint64_t seed = 0);

    const std::vector<Segment>& segments() const { return segments_; }
    double lane_width() const { return lane_width_; }
    int num_lanes() const { return kNumLanes; }
    const Pose& start_pose() const { return start_; }
    std::uint64_t seed() const { return seed_; }
    double total_length() const { return total_length_; }

    /// Lateral offsets of the road edges relative to the first-lane midline.
    double right_edge_offset() const { return -0.5 * lane_width_; }
    double left_edge_offset() const { return (kNumLanes - 0.5) * lane_width_; }

    /// Midline point; beyond either end the path is extended along the end tangent.
    Point point_at(double s) const;
    double heading_at(double s) const;
    double curvature_at(double s) const;
    Pose pose_at(double s) const;
    /// Point at lateral offset n (left positive) from the midline at s.
    Point offset_point(double s, double n) const;

    std::size_t segment_index(double s) const;
    /// Start pose and start arc length of segment i.
    const Pose& segment_start(std::size_t i) const { return seg_start_[i]; }
    double segment_s0(std::size_t i) const { return seg_s0_[i]; }

    bool operator==(const TrackPath& other) const;

private:
    Pose local_pose(std::size_t i, double ds) const;

    std::vector<Segment> segments_;
    double lane_width_;
    Pose start_;
    std::uint64_t seed_;
    double total_length_ = 0.0;
    std::vector<Pose> seg_start_;
    std::vector<double> seg_s0_;
};

/// 600-m path: 200 m straight, 200 m arc of sweep phi, 200 m straight.
TrackPath build_training_path(double phi_rad);

/// The 25 sweeps used for data collection, -180..180 deg in 15-deg steps.
std::vector<double> training_sweeps_deg();

struct RandomPathRules {
    double min_length = 100.0, max_length = 150.0;
    double min_radius = 100.0, max_radius = 150.0;
    double min_sweep_deg = 45.0, max_sweep_deg = 135.0;
    double p_curve_to_straight = 0.4;
};

/// Random straight/arc chain, cut so total_length equals target_length.
/// Always starts with a straight; arcs never follow arcs of the same direction.
TrackPath generate_random_path(std::uint64_t seed, double target_length,
                               const RandomPathRules& rules = {});

/// Smallest distance between midline points that are more than `min_separation`
/// apart in arc length. Used to reject paths that fold back onto themselves.
double self_clearance(const TrackPath& path, double min_separation = 200.0, double step = 2.0);

/// First seed >= base_seed whose random path keeps `clearance` metres between
/// non-neighbouring parts of the road.
TrackPath pick_clear_random_path(std::uint64_t base_seed, double target_length,
                                 double clearance = 60.0);

/// Global closest point on the first-lane midline; ties resolve to the smallest s.
/// Throws OutOfRange when the position is more than max_distance from the path.
PathQuery closest_midline_point(const TrackPath& path, Point position,
                                double max_distance = 200.0);

inline constexpr double kRayCap = 60.0;
/// Offsets of the five environment rays, deg, relative to the heading.
inline constexpr double kRayOffsetsDeg[5] = {-30.0, -15.0, 0.0, 15.0, 30.0};

/// Distance from the pose along heading+offset to the outer road edge, capped at 60 m.
/// Throws OutsideRoad if the pose is not on the road surface.
double boundary_ray_distance(const TrackPath& path, const Pose& pose, double offset_rad);

/// Line-delimited text: header `TRACK 1 <lane_width> <seed> <x0> <y0> <heading0>`,
/// then one segment per line, `S <L>` or `A <R> <phi_deg>`.
std::string to_text(const TrackPath& path);
TrackPath from_text(std::string_view text);

}  // namespace hapdrive::track
