#include <cstdio>
#include <string>

#include "ttpark/harness.hpp"

namespace ttpark {

namespace {

class SvgWriter {
 public:
  explicit SvgWriter(const AlignedRect& world) : world_(world) {}

  double px(double x) const { return (x - world_.min_x) * kSvgPixelsPerMetre; }
  double py(double y) const { return (world_.max_y - y) * kSvgPixelsPerMetre; }

  void line(const std::string& s) { out_ += s + "\n"; }

  void polygon(const OrientedBox& b, const char* cls) {
    std::string pts;
    for (const Vec2& c : b.corners()) pts += fmt("%.2f,%.2f ", px(c.x), py(c.y));
    pts.pop_back();
    line(fmt("  <polygon class=\"%s\" points=\"", cls) + pts + "\"/>");
  }

  template <typename Points>
  void polyline(const Points& pts, const char* cls) {
    if (pts.size() < 2) return;
    std::string s;
    for (const Vec2& p : pts) s += fmt("%.2f,%.2f ", px(p.x), py(p.y));
    s.pop_back();
    line(fmt("  <polyline class=\"%s\" points=\"", cls) + s + "\"/>");
  }

  void arrow(const Pose2& pose, double length, const char* cls) {
    const Vec2 tip = pose.position() + length * unit(pose.heading());
    line(fmt("  <line class=\"%s\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>", cls, px(pose.x()),
             py(pose.y()), px(tip.x), py(tip.y)));
    line(fmt("  <circle class=\"%s\" cx=\"%.2f\" cy=\"%.2f\" r=\"3\"/>", cls, px(pose.x()), py(pose.y())));
  }

  template <typename... Args>
  static std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
  }

  std::string take() { return std::move(out_); }

 private:
  AlignedRect world_;
  std::string out_;
};

}  // namespace

std::string render_svg(const SimResult& r, const Scenario& sc) {
  SvgWriter w(sc.bounds);
  const double width = sc.bounds.width() * kSvgPixelsPerMetre;
  const double height = sc.bounds.height() * kSvgPixelsPerMetre;
  w.line(SvgWriter::fmt(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">", width,
      height, width, height));
  w.line("  <style>");
  w.line("    .bounds { fill: #f4f4f4; stroke: #333; stroke-width: 2; }");
  w.line("    .obstacle { fill: #888; stroke: #444; }");
  w.line("    .spot { fill: none; stroke: #2a7; stroke-dasharray: 4 3; }");
  w.line("    .goal-pose { stroke: #d80; fill: #d80; stroke-width: 2; }");
  w.line("    .plan { fill: none; stroke: #aac; stroke-width: 1; stroke-dasharray: 2 2; }");
  w.line("    .trace-tractor { fill: none; stroke: #15c; stroke-width: 1.5; }");
  w.line("    .trace-trailer { fill: none; stroke: #c51; stroke-width: 1.5; }");
  w.line("    .footprint-start { fill: none; stroke: #15c; stroke-width: 1.5; }");
  w.line("    .footprint-end { fill: rgba(20, 160, 60, 0.25); stroke: #195; stroke-width: 1.5; }");
  w.line("    .footprint-failure { fill: rgba(220, 20, 20, 0.35); stroke: #c00; stroke-width: 2; }");
  w.line("  </style>");
  w.line(SvgWriter::fmt("  <rect class=\"bounds\" x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\"/>", width, height));

  for (const auto& ob : sc.obstacles) w.polygon(ob, "obstacle");
  for (const auto& spot : sc.spots) {
    const auto parked = footprints(state_from_trailer_pose(spot.goal, 0.0, sc.vehicle), sc.vehicle);
    w.polygon(parked.trailer, "spot");
  }
  if (const ParkingSpot* target = sc.find_spot(r.spot_id)) w.arrow(target->goal, 3.0, "goal-pose");

  std::vector<Vec2> planned;
  for (const auto& s : r.path.states) planned.push_back(s.position());
  w.polyline(planned, "plan");

  std::vector<Vec2> tractor;
  std::vector<Vec2> trailer;
  for (const auto& p : r.trajectory) {
    tractor.push_back(p.state.position());
    trailer.push_back(trailer_axle(p.state, sc.vehicle));
  }
  w.polyline(tractor, "trace-tractor");
  w.polyline(trailer, "trace-trailer");

  if (!r.trajectory.empty()) {
    const auto start = footprints(r.trajectory.front().state, sc.vehicle);
    w.polygon(start.tractor, "footprint-start");
    w.polygon(start.trailer, "footprint-start");
    const auto end = footprints(r.trajectory.back().state, sc.vehicle);
    const char* cls = (r.collision || r.jackknife) ? "footprint-failure" : "footprint-end";
    w.polygon(end.tractor, cls);
    w.polygon(end.trailer, cls);
  }
  w.line("</svg>");
  return w.take();
}

}  // namespace ttpark
