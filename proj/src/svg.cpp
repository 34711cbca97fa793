#include "hypolap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hypolap/errors.hpp"
#include "hypolap/geometry.hpp"

namespace hypolap::svg {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string spectrum_bars(const std::vector<double>& eigenvalues, const std::string& title) {
  const double width = 640, height = 360, margin = 40;
  const double top = eigenvalues.empty()
                         ? 1.0
                         : std::max(1e-300, *std::max_element(eigenvalues.begin(),
                                                              eigenvalues.end()));
  const double slot = eigenvalues.empty()
                          ? 0.0
                          : (width - 2 * margin) / static_cast<double>(eigenvalues.size());
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
  for (std::size_t l = 0; l < eigenvalues.size(); ++l) {
    const double h = std::max(0.0, eigenvalues[l]) / top * (height - 2 * margin - 10);
    out << "<rect x=\"" << num(margin + slot * static_cast<double>(l) + 0.1 * slot)
        << "\" y=\"" << num(height - margin - h) << "\" width=\"" << num(0.8 * slot)
        << "\" height=\"" << num(h) << "\" fill=\"steelblue\"/>\n";
  }
  out << "<text x=\"" << margin << "\" y=\"" << height - 12
      << "\" font-family=\"sans-serif\" font-size=\"11\">index 0.."
      << (eigenvalues.empty() ? 0 : eigenvalues.size() - 1) << ", max " << num(top)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string sphere_quiver(const PointCloud& base, const Eigen::MatrixXd& vectors,
                          const Vec3& view, const std::string& title) {
  if (base.cols() != vectors.cols() || base.rows() != 3 || vectors.rows() != 3) {
    throw_invalid("sphere_quiver: expects matching 3 x n point and vector arrays");
  }
  const Vec3 w = view.normalized();
  const Eigen::Matrix<double, 3, 2> frame = geometry::tangent_frame(w);
  const double size = 600, radius = 260, centre = 300, arrow = 0.08;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
      << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"12\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">"
      << escape(title) << "</text>\n";
  out << "<circle cx=\"" << centre << "\" cy=\"" << centre << "\" r=\"" << radius
      << "\" fill=\"none\" stroke=\"gray\"/>\n";
  for (Eigen::Index k = 0; k < base.cols(); ++k) {
    const Vec3 p = base.col(k);
    if (p.dot(w) <= 0.0) continue;
    const Vec3 q = p + arrow * vectors.col(k);
    const double x0 = centre + radius * p.dot(frame.col(0));
    const double y0 = centre - radius * p.dot(frame.col(1));
    const double x1 = centre + radius * q.dot(frame.col(0));
    const double y1 = centre - radius * q.dot(frame.col(1));
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1)
        << "\" y2=\"" << num(y1) << "\" stroke=\"firebrick\" stroke-width=\"1.2\"/>\n";
    out << "<circle cx=\"" << num(x0) << "\" cy=\"" << num(y0)
        << "\" r=\"1.5\" fill=\"black\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace hypolap::svg
