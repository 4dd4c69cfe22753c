#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "densgeo/checks.hpp"
#include "densgeo/config.hpp"

namespace densgeo {

// Fixed 17-significant-digit rendering so that reports are byte-stable
// across runs and machines with the same arithmetic.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class JsonWriter {
 public:
  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(const std::string& k) {
    separate();
    write_string(k);
    out_ += ": ";
    pending_value_ = true;
  }

  void value(double v) { atom(format_double(v)); }
  void value(int v) { atom(std::to_string(v)); }
  void value(std::int64_t v) { atom(std::to_string(v)); }
  void value(std::uint64_t v) { atom(std::to_string(v)); }
  void value(bool v) { atom(v ? "true" : "false"); }
  void value(const std::string& v) {
    separate();
    write_string(v);
    pending_value_ = false;
  }
  void value(const char* v) { value(std::string(v)); }

  const std::string& str() const { return out_; }

 private:
  void open(char c) {
    separate();
    out_ += c;
    depth_ += 1;
    had_item_.push_back(false);
    pending_value_ = false;
  }

  void close(char c) {
    depth_ -= 1;
    if (had_item_.back()) newline();
    had_item_.pop_back();
    out_ += c;
    if (!had_item_.empty()) had_item_.back() = true;
    pending_value_ = false;
  }

  void separate() {
    if (pending_value_) return;
    if (!had_item_.empty()) {
      if (had_item_.back()) out_ += ',';
      had_item_.back() = true;
      newline();
    }
  }

  void newline() {
    out_ += '\n';
    out_.append(static_cast<std::size_t>(2 * depth_), ' ');
  }

  void atom(const std::string& text) {
    separate();
    out_ += text;
    pending_value_ = false;
  }

  void write_string(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> had_item_;
  int depth_ = 0;
  bool pending_value_ = false;
};

struct Cell {
  enum class Kind { Number, Integer, Text } kind = Kind::Number;
  double num = 0.0;
  std::int64_t integer = 0;
  std::string text;

  static Cell of(double v) { return Cell{Kind::Number, v, 0, {}}; }
  static Cell of(int v) { return Cell{Kind::Integer, 0.0, v, {}}; }
  static Cell of(std::int64_t v) { return Cell{Kind::Integer, 0.0, v, {}}; }
  static Cell of(std::string v) { return Cell{Kind::Text, 0.0, 0, std::move(v)}; }
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string experiment;
  ExperimentConfig config;
  std::vector<CheckRecord> checks;
  std::vector<Table> tables;
};

inline bool report_all_pass(const Report& r) {
  for (const auto& c : r.checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace detail {

// Delivery destinations (out, csv) are deliberately excluded so that the
// report bytes depend only on the experiment itself.
inline void write_config_echo(JsonWriter& w, const ExperimentConfig& cfg) {
  w.begin_object();
  w.key("experiment");
  w.value(cfg.experiment_name);
  w.key("space");
  w.begin_object();
  w.key("kind");
  w.value(cfg.space.kind);
  if (cfg.space.kind == "cycle") {
    w.key("n");
    w.value(cfg.space.n);
    w.key("circumference");
    w.value(cfg.space.circumference);
    w.key("laplacian_style");
    w.value(cfg.space.style == LaplacianStyle::Variational ? "variational" : "compositional");
  } else {
    w.key("volumes");
    w.begin_array();
    for (double v : cfg.space.volumes) w.value(v);
    w.end_array();
    w.key("edges");
    w.begin_array();
    for (const Edge& e : cfg.space.edges) {
      w.begin_array();
      w.value(e.i);
      w.value(e.j);
      w.value(e.weight);
      w.end_array();
    }
    w.end_array();
  }
  w.end_object();
  w.key("metric");
  w.value(cfg.metric);
  w.key("alphas");
  w.begin_array();
  for (double a : cfg.alphas) w.value(a);
  w.end_array();
  w.key("trials");
  w.value(cfg.trials);
  if (cfg.seed_set) {
    w.key("seed");
    w.value(cfg.seed);
  }
  w.key("fd_step");
  w.value(cfg.fd_step);
  if (cfg.experiment == ExperimentKind::GeodesicCompare) {
    w.key("geodesic");
    w.begin_object();
    w.key("t_final");
    w.value(cfg.geodesic.t_final);
    w.key("steps");
    w.value(cfg.geodesic.steps);
    if (!cfg.geodesic.rho0.empty()) {
      w.key("rho0");
      w.begin_array();
      for (double v : cfg.geodesic.rho0) w.value(v);
      w.end_array();
      w.key("v0");
      w.begin_array();
      for (double v : cfg.geodesic.v0) w.value(v);
      w.end_array();
    }
    w.end_object();
  }
  w.end_object();
}

inline void write_cell(JsonWriter& w, const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Number: w.value(c.num); break;
    case Cell::Kind::Integer: w.value(c.integer); break;
    case Cell::Kind::Text: w.value(c.text); break;
  }
}

inline std::string csv_cell(const Cell& c) {
  switch (c.kind) {
    case Cell::Kind::Number: return format_double(c.num);
    case Cell::Kind::Integer: return std::to_string(c.integer);
    case Cell::Kind::Text: return c.text;
  }
  return {};
}

}  // namespace detail

inline std::string render_report_json(const Report& r) {
  JsonWriter w;
  w.begin_object();
  w.key("experiment");
  w.value(r.experiment);
  w.key("config");
  detail::write_config_echo(w, r.config);
  w.key("checks");
  w.begin_array();
  for (const CheckRecord& c : r.checks) {
    w.begin_object();
    w.key("name");
    w.value(c.name);
    w.key("value");
    w.value(c.value);
    w.key("threshold");
    w.value(c.threshold);
    w.key("comparison");
    w.value(c.comparison);
    w.key("pass");
    w.value(c.pass);
    w.end_object();
  }
  w.end_array();
  w.key("tables");
  w.begin_array();
  for (const Table& t : r.tables) {
    w.begin_object();
    w.key("name");
    w.value(t.name);
    w.key("columns");
    w.begin_array();
    for (const auto& c : t.columns) w.value(c);
    w.end_array();
    w.key("rows");
    w.begin_array();
    for (const auto& row : t.rows) {
      w.begin_array();
      for (const Cell& c : row) detail::write_cell(w, c);
      w.end_array();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("summary");
  w.begin_object();
  w.key("checks_total");
  w.value(static_cast<std::int64_t>(r.checks.size()));
  std::int64_t passed = 0;
  for (const auto& c : r.checks) passed += c.pass ? 1 : 0;
  w.key("checks_passed");
  w.value(passed);
  w.key("all_pass");
  w.value(report_all_pass(r));
  w.end_object();
  w.end_object();
  return w.str() + "\n";
}

inline std::string render_report_csv(const Report& r) {
  std::string out;
  if (r.tables.empty()) {
    out += "name,value,threshold,comparison,pass\n";
    for (const CheckRecord& c : r.checks) {
      out += c.name + ',' + format_double(c.value) + ',' + format_double(c.threshold) + ',' +
             c.comparison + ',' + (c.pass ? "true" : "false") + '\n';
    }
    return out;
  }
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    const Table& t = r.tables[i];
    if (i > 0) out += '\n';
    if (r.tables.size() > 1) out += "# " + t.name + '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      out += (c ? "," : "") + t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += detail::csv_cell(row[c]);
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace densgeo
