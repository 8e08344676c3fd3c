#include "trajtopo/diagram_io.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace trajtopo {

namespace {

nlohmann::ordered_json meta_json(const RunMeta& meta) {
  return {{"experiment", meta.experiment}, {"system", meta.system},
          {"N", meta.N},                   {"n", meta.n},
          {"t", meta.t},                   {"seed", meta.seed},
          {"r_max", meta.r_max}};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_diagram_json(std::ostream& os, const PersistenceDiagram& diagram,
                        const RunMeta& meta) {
  nlohmann::ordered_json doc;
  doc["meta"] = meta_json(meta);
  doc["max_dim"] = diagram.max_dim;
  auto pairs = nlohmann::ordered_json::array();
  for (const auto& p : diagram.pairs) {
    nlohmann::ordered_json jp{{"dim", p.dim}, {"birth", p.birth}};
    if (p.infinite()) {
      jp["death"] = nullptr;
    } else {
      jp["death"] = p.death;
    }
    pairs.push_back(std::move(jp));
  }
  doc["pairs"] = std::move(pairs);
  os << doc.dump(2) << '\n';
}

void write_diagram_csv(std::ostream& os, const PersistenceDiagram& diagram) {
  os << "dim,birth,death\n";
  char buf[40];
  for (const auto& p : diagram.pairs) {
    std::snprintf(buf, sizeof buf, "%.17g", p.birth);
    os << p.dim << ',' << buf << ',';
    if (p.infinite()) {
      os << "inf";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", p.death);
      os << buf;
    }
    os << '\n';
  }
}

void write_matrix_json(std::ostream& os, const DissimilarityMatrix& m,
                       const RunMeta& meta) {
  nlohmann::ordered_json doc;
  doc["N"] = m.size;
  doc["n"] = m.series_length;
  doc["t"] = m.slack;
  doc["system"] = meta.system;
  doc["seed"] = meta.seed;
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.size; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int j = 0; j < m.size; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  doc["matrix"] = std::move(rows);
  os << doc.dump() << '\n';
}

void write_diagram_svg(std::ostream& os, const PersistenceDiagram& diagram,
                       const RunMeta& meta) {
  // Layout: square plot area with an extra band above for infinite bars.
  const double size = 480.0;
  const double ml = 64.0, mr = 24.0, mt = 56.0;
  const double plot = size - ml - mr;
  const double band = 26.0; // infinity band height above the plot square

  double vmax = diagram.r_max;
  for (const auto& p : diagram.pairs) {
    vmax = std::max(vmax, p.birth);
    if (!p.infinite()) vmax = std::max(vmax, p.death);
  }
  if (vmax <= 0.0) vmax = 1.0;
  vmax *= 1.05;

  auto X = [&](double v) { return ml + plot * (v / vmax); };
  auto Y = [&](double v) { return mt + band + plot * (1.0 - v / vmax); };
  const double y_inf = mt + band * 0.5;

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  auto color = [&](int dim) { return colors[std::min(dim, 3)]; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
     << "\" height=\"" << size + band << "\" viewBox=\"0 0 " << size << ' '
     << size + band << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" "
        "font-size=\"14\">persistence diagram — "
     << meta.experiment << " (" << meta.system << ", N=" << meta.N
     << ", n=" << meta.n << ", t=" << meta.t << ")</text>\n";

  // Axes.
  double x0 = X(0.0), x1 = X(vmax), ybot = Y(0.0), ytop = Y(vmax);
  os << "<line x1=\"" << x0 << "\" y1=\"" << ybot << "\" x2=\"" << x1
     << "\" y2=\"" << ybot << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << ybot << "\" x2=\"" << x0
     << "\" y2=\"" << ytop << "\" stroke=\"black\"/>\n";
  // Diagonal.
  os << "<line x1=\"" << x0 << "\" y1=\"" << ybot << "\" x2=\"" << x1
     << "\" y2=\"" << ytop << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  // Infinity band.
  os << "<line x1=\"" << x0 << "\" y1=\"" << y_inf << "\" x2=\"" << x1
     << "\" y2=\"" << y_inf
     << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"2 3\"/>\n";
  os << "<text x=\"" << x1 + 4 << "\" y=\"" << y_inf + 4
     << "\" font-family=\"sans-serif\" font-size=\"13\">&#8734;</text>\n";

  // Ticks.
  for (int k = 0; k <= 4; ++k) {
    double v = vmax * k / 4.0;
    os << "<line x1=\"" << X(v) << "\" y1=\"" << ybot << "\" x2=\"" << X(v)
       << "\" y2=\"" << ybot + 4 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << X(v) << "\" y=\"" << ybot + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\" "
          "text-anchor=\"middle\">"
       << fmt(v) << "</text>\n";
    os << "<line x1=\"" << x0 - 4 << "\" y1=\"" << Y(v) << "\" x2=\"" << x0
       << "\" y2=\"" << Y(v) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x0 - 6 << "\" y=\"" << Y(v) + 4
       << "\" font-family=\"sans-serif\" font-size=\"11\" "
          "text-anchor=\"end\">"
       << fmt(v) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << ybot + 38
     << "\" font-family=\"sans-serif\" font-size=\"12\" "
        "text-anchor=\"middle\">birth</text>\n";
  os << "<text x=\"16\" y=\"" << (ybot + ytop) / 2
     << "\" font-family=\"sans-serif\" font-size=\"12\" "
        "transform=\"rotate(-90 16 "
     << (ybot + ytop) / 2 << ")\" text-anchor=\"middle\">death</text>\n";

  // Markers: dim 0 circle, dim 1 square, dim 2 triangle, dim 3+ diamond.
  auto marker = [&](int dim, double cx, double cy) {
    const char* c = color(dim);
    switch (std::min(dim, 3)) {
      case 0:
        os << "<circle cx=\"" << cx << "\" cy=\"" << cy
           << "\" r=\"3.5\" fill=\"" << c << "\" fill-opacity=\"0.75\"/>\n";
        break;
      case 1:
        os << "<rect x=\"" << cx - 3 << "\" y=\"" << cy - 3
           << "\" width=\"6\" height=\"6\" fill=\"" << c
           << "\" fill-opacity=\"0.75\"/>\n";
        break;
      case 2:
        os << "<polygon points=\"" << cx << ',' << cy - 4 << ' ' << cx - 3.5
           << ',' << cy + 3 << ' ' << cx + 3.5 << ',' << cy + 3
           << "\" fill=\"" << c << "\" fill-opacity=\"0.75\"/>\n";
        break;
      default:
        os << "<polygon points=\"" << cx << ',' << cy - 4 << ' ' << cx - 4
           << ',' << cy << ' ' << cx << ',' << cy + 4 << ' ' << cx + 4 << ','
           << cy << "\" fill=\"" << c << "\" fill-opacity=\"0.75\"/>\n";
    }
  };

  for (const auto& p : diagram.pairs) {
    double cy = p.infinite() ? y_inf : Y(p.death);
    marker(p.dim, X(p.birth), cy);
  }

  // Legend.
  double lx = x0 + 12, ly = mt + band + 14;
  for (int d = 0; d <= diagram.max_dim && d <= 3; ++d) {
    marker(d, lx, ly);
    os << "<text x=\"" << lx + 10 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">H" << d
       << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
}

}  // namespace trajtopo
