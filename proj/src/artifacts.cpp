#include "limitlab/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "limitlab/error.hpp"

namespace limitlab {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::InvalidInput, "write failed for " + path);
}

SvgCanvas::SvgCanvas(int pixels) : pixels_(pixels) {}

double SvgCanvas::px(double x) const { return pixels_ * (0.5 + 0.45 * x); }
double SvgCanvas::py(double y) const { return pixels_ * (0.5 - 0.45 * y); }

namespace {

std::string fixed(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v, std::chars_format::fixed, 3);
  return std::string(buffer, result.ptr);
}

}  // namespace

void SvgCanvas::boundary_circle() { circle(0.0, 0.0, 1.0, "#444", 1.0); }

void SvgCanvas::dot(double x, double y, double radius, const std::string& colour) {
  body_ << "<circle cx=\"" << fixed(px(x)) << "\" cy=\"" << fixed(py(y)) << "\" r=\"" << fixed(radius)
        << "\" fill=\"" << colour << "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& colour, double width) {
  body_ << "<circle cx=\"" << fixed(px(cx)) << "\" cy=\"" << fixed(py(cy)) << "\" r=\"" << fixed(0.45 * pixels_ * r)
        << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << fixed(width) << "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& points, const std::string& colour,
                         double width) {
  body_ << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << fixed(width) << "\" points=\"";
  for (std::size_t k = 0; k < points.size(); ++k) {
    body_ << (k ? " " : "") << fixed(px(points[k].first)) << ',' << fixed(py(points[k].second));
  }
  body_ << "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& label) {
  body_ << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(py(y)) << "\" font-size=\"14\">" << label << "</text>\n";
}

std::string SvgCanvas::str() const {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels_ << "\" height=\"" << pixels_
      << "\" viewBox=\"0 0 " << pixels_ << ' ' << pixels_ << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
  return out.str();
}

}  // namespace limitlab
