#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace limitlab {

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& contents);

/// Minimal SVG canvas in disc coordinates: the unit disc is drawn centred,
/// with y pointing up.
class SvgCanvas {
 public:
  explicit SvgCanvas(int pixels = 800);

  void boundary_circle();
  void dot(double x, double y, double radius, const std::string& colour);
  void polyline(const std::vector<std::pair<double, double>>& points, const std::string& colour, double width);
  void circle(double cx, double cy, double r, const std::string& colour, double width);
  void text(double x, double y, const std::string& label);

  std::string str() const;

 private:
  double px(double x) const;
  double py(double y) const;

  int pixels_;
  std::ostringstream body_;
};

}  // namespace limitlab
