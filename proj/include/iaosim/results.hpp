#pragma once

#include <string>
#include <vector>

#include "iaosim/types.hpp"

namespace iaosim {

/// Serializes at 9 significant digits; the source of every number that leaves
/// the process, so equal inputs produce byte-identical outputs.
std::string format_number(double value);

/// One output table: named columns, preformatted cells, per-column numeric
/// flag so the JSON emitter can restore number typing.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<bool> numeric;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ResultBundle {
  std::vector<Table> tables;
  std::vector<Curve> curves;
  std::string plot_title;
  std::string plot_xlabel;
  std::string plot_ylabel;

  const Table& table(const std::string& name) const;
};

enum class EmitFormat { Csv, Json, Svg };

/// Writes the bundle under `out_dir` (one CSV per table, one results.json, or
/// one plot.svg) and returns the paths written.
std::vector<std::string> emit(const ResultBundle& bundle, EmitFormat format,
                              const std::string& out_dir);

std::string render_csv(const Table& table);
std::string render_json(const ResultBundle& bundle);
std::string render_svg(const ResultBundle& bundle);

}  // namespace iaosim
