#include "gmpc/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace gmpc {

namespace {

constexpr double kPanelW = 420.0;
constexpr double kPanelH = 320.0;
constexpr double kMargin = 40.0;

struct Frame
{
  double x0, y0;          // panel origin in the document
  double xmin, xmax, ymin, ymax;

  double px(double x) const { return x0 + kMargin + (x - xmin) / (xmax - xmin) * (kPanelW - 2 * kMargin); }
  double py(double y) const { return y0 + kPanelH - kMargin - (y - ymin) / (ymax - ymin) * (kPanelH - 2 * kMargin); }
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_label(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void fix_range(double & lo, double & hi)
{
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

void polyline(std::ostringstream & os, const Frame & f, const std::vector<double> & xs, const std::vector<double> & ys,
              const char * color)
{
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) { os << (i ? " " : "") << fmt(f.px(xs[i])) << ',' << fmt(f.py(ys[i])); }
  os << "\"/>\n";
}

void axes(std::ostringstream & os, const Frame & f, const char * title, const char * xlabel)
{
  const double l = f.x0 + kMargin, r = f.x0 + kPanelW - kMargin;
  const double t = f.y0 + kMargin, b = f.y0 + kPanelH - kMargin;
  os << "<rect x=\"" << fmt(l) << "\" y=\"" << fmt(t) << "\" width=\"" << fmt(r - l) << "\" height=\"" << fmt(b - t)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << fmt((l + r) / 2) << "\" y=\"" << fmt(t - 12) << "\" text-anchor=\"middle\">" << title
     << "</text>\n";
  os << "<text x=\"" << fmt((l + r) / 2) << "\" y=\"" << fmt(b + 30) << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n";
  os << "<text x=\"" << fmt(l) << "\" y=\"" << fmt(b + 14) << "\" text-anchor=\"middle\">" << fmt_label(f.xmin) << "</text>\n";
  os << "<text x=\"" << fmt(r) << "\" y=\"" << fmt(b + 14) << "\" text-anchor=\"middle\">" << fmt_label(f.xmax) << "</text>\n";
  os << "<text x=\"" << fmt(l - 4) << "\" y=\"" << fmt(b) << "\" text-anchor=\"end\">" << fmt_label(f.ymin) << "</text>\n";
  os << "<text x=\"" << fmt(l - 4) << "\" y=\"" << fmt(t + 10) << "\" text-anchor=\"end\">" << fmt_label(f.ymax) << "</text>\n";
}

}  // namespace

std::string render_plot_svg(const std::vector<SimRecord> & records, const ReferenceTrajectory & reference)
{
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(2 * kPanelW) << "\" height=\"" << fmt(kPanelH)
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (records.empty()) {
    os << "</svg>\n";
    return os.str();
  }

  std::vector<double> t, ep, eR, x, y, rx, ry;
  for (const SimRecord & r : records) {
    t.push_back(r.t);
    ep.push_back(r.ep);
    eR.push_back(r.eR);
    x.push_back(r.pose.x());
    y.push_back(r.pose.y());
  }
  for (const TrajectorySample & s : reference.samples()) {
    if (s.t > records.back().t) { break; }
    rx.push_back(s.xd.x());
    ry.push_back(s.xd.y());
  }

  Frame ef{0.0, 0.0, t.front(), t.back(), 0.0,
           std::max(*std::max_element(ep.begin(), ep.end()), *std::max_element(eR.begin(), eR.end()))};
  fix_range(ef.xmin, ef.xmax);
  fix_range(ef.ymin, ef.ymax);
  axes(os, ef, "tracking error (blue: e_p [m], red: e_R [rad])", "t [s]");
  polyline(os, ef, t, ep, "#1f77b4");
  polyline(os, ef, t, eR, "#d62728");

  std::vector<double> all_x = x, all_y = y;
  all_x.insert(all_x.end(), rx.begin(), rx.end());
  all_y.insert(all_y.end(), ry.begin(), ry.end());
  Frame pf{kPanelW, 0.0, *std::min_element(all_x.begin(), all_x.end()), *std::max_element(all_x.begin(), all_x.end()),
           *std::min_element(all_y.begin(), all_y.end()), *std::max_element(all_y.begin(), all_y.end())};
  fix_range(pf.xmin, pf.xmax);
  fix_range(pf.ymin, pf.ymax);
  axes(os, pf, "path (gray: reference, blue: robot)", "x [m]");
  if (!rx.empty()) { polyline(os, pf, rx, ry, "#999999"); }
  polyline(os, pf, x, y, "#1f77b4");

  os << "</svg>\n";
  return os.str();
}

}  // namespace gmpc
