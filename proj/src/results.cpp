#include "iaosim/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iaosim/error.hpp"

namespace iaosim {

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // collapse -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

const Table& ResultBundle::table(const std::string& name) const {
  for (const Table& t : tables) {
    if (t.name == name) return t;
  }
  throw Error(ErrorKind::ValidationError, "result bundle has no table '" + name + "'");
}

std::string render_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
  return out.str();
}

std::string render_json(const ResultBundle& bundle) {
  nlohmann::ordered_json doc;
  for (const Table& t : bundle.tables) {
    nlohmann::ordered_json jt;
    jt["columns"] = t.columns;
    jt["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c < t.numeric.size() && t.numeric[c] && !row[c].empty()) {
          jr.push_back(std::stod(row[c]));
        } else {
          jr.push_back(row[c]);
        }
      }
      jt["rows"].push_back(std::move(jr));
    }
    doc[t.name] = std::move(jt);
  }
  return doc.dump(2) + "\n";
}

namespace {

struct PlotFrame {
  double x0, x1, y0, y1;        // data range
  double px0, px1, py0, py1;    // pixel range (py0 = bottom)

  double px(double x) const { return px0 + (x - x0) / (x1 - x0) * (px1 - px0); }
  double py(double y) const { return py0 - (y - y0) / (y1 - y0) * (py0 - py1); }
};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace

std::string render_svg(const ResultBundle& bundle) {
  if (bundle.curves.empty()) {
    throw Error(ErrorKind::ValidationError, "result bundle has no series to plot");
  }
  const int width = 960, height = 540;
  PlotFrame f;
  f.px0 = 80;
  f.px1 = width - 30;
  f.py0 = height - 60;
  f.py1 = 40;
  f.x0 = f.y0 = std::numeric_limits<double>::infinity();
  f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
  for (const Curve& c : bundle.curves) {
    for (double v : c.x) {
      f.x0 = std::min(f.x0, v);
      f.x1 = std::max(f.x1, v);
    }
    for (double v : c.y) {
      f.y0 = std::min(f.y0, v);
      f.y1 = std::max(f.y1, v);
    }
  }
  if (!(f.x1 > f.x0)) f.x1 = f.x0 + 1.0;
  if (!(f.y1 > f.y0)) {
    f.y0 -= 1.0;
    f.y1 += 1.0;
  }

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!bundle.plot_title.empty()) {
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << bundle.plot_title << "</text>\n";
  }
  // axes
  svg << "<line x1=\"" << coord(f.px0) << "\" y1=\"" << coord(f.py0) << "\" x2=\""
      << coord(f.px1) << "\" y2=\"" << coord(f.py0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << coord(f.px0) << "\" y1=\"" << coord(f.py0) << "\" x2=\""
      << coord(f.px0) << "\" y2=\"" << coord(f.py1) << "\" stroke=\"black\"/>\n";
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / n_ticks;
    const double y = f.y0 + (f.y1 - f.y0) * i / n_ticks;
    svg << "<line x1=\"" << coord(f.px(x)) << "\" y1=\"" << coord(f.py0) << "\" x2=\""
        << coord(f.px(x)) << "\" y2=\"" << coord(f.py0 + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(f.px(x)) << "\" y=\"" << coord(f.py0 + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(x) << "</text>\n";
    svg << "<line x1=\"" << coord(f.px0 - 5) << "\" y1=\"" << coord(f.py(y)) << "\" x2=\""
        << coord(f.px0) << "\" y2=\"" << coord(f.py(y)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << coord(f.px0 - 8) << "\" y=\"" << coord(f.py(y) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(y) << "</text>\n";
  }
  if (!bundle.plot_xlabel.empty()) {
    svg << "<text x=\"" << coord((f.px0 + f.px1) / 2) << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << bundle.plot_xlabel << "</text>\n";
  }
  if (!bundle.plot_ylabel.empty()) {
    svg << "<text x=\"20\" y=\"" << coord((f.py0 + f.py1) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 20 " << coord((f.py0 + f.py1) / 2) << ")\">"
        << bundle.plot_ylabel << "</text>\n";
  }
  for (std::size_t k = 0; k < bundle.curves.size(); ++k) {
    const Curve& c = bundle.curves[k];
    const char* color = kColors[k % (sizeof(kColors) / sizeof(kColors[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (i) svg << ' ';
      svg << coord(f.px(c.x[i])) << ',' << coord(f.py(c.y[i]));
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << coord(f.px1 - 180) << "\" y=\"" << coord(f.py1 + 16 + 16 * k)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
        << c.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit(const ResultBundle& bundle, EmitFormat format,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::IoError, "cannot create output directory '" + out_dir + "'");
  }
  const auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
    return path.string();
  };

  std::vector<std::string> written;
  switch (format) {
    case EmitFormat::Csv: {
      if (bundle.tables.empty()) {
        throw Error(ErrorKind::ValidationError, "result bundle has no tables");
      }
      for (const Table& t : bundle.tables) {
        written.push_back(write(t.name + ".csv", render_csv(t)));
      }
      break;
    }
    case EmitFormat::Json: {
      if (bundle.tables.empty()) {
        throw Error(ErrorKind::ValidationError, "result bundle has no tables");
      }
      written.push_back(write("results.json", render_json(bundle)));
      break;
    }
    case EmitFormat::Svg: {
      written.push_back(write("plot.svg", render_svg(bundle)));
      break;
    }
  }
  return written;
}

}  // namespace iaosim
