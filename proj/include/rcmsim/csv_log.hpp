#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rcmsim/simulation.hpp"

namespace rcmsim {

/// Normative log column order. All numeric values are printed with 17
/// significant digits so a parsed file reproduces the run bit-exactly;
/// `case` is the integer LoadCase code.
inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c;
    c.emplace_back("t");
    for (int i = 1; i <= kNumJoints; ++i) c.push_back("q" + std::to_string(i));
    c.emplace_back("eta");
    const char* points[] = {"xee",      "xins",     "xrcm",     "xtrocar",
                            "xdes",     "frcm_true", "fins_true", "frcm_hat",
                            "fins_hat"};
    for (const char* p : points) {
      for (const char* ax : {"_x", "_y", "_z"}) {
        c.push_back(std::string(p) + ax);
      }
    }
    c.emplace_back("gamma_hat");
    c.emplace_back("case");
    c.emplace_back("e_rcm");
    c.emplace_back("e_ins");
    return c;
  }();
  return cols;
}

namespace detail {

inline void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

inline double parse_number(const std::string& field, std::size_t line_no) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw ConfigError("CSV line " + std::to_string(line_no) +
                      ": cannot parse number '" + field + "'");
  }
  return v;
}

}  // namespace detail

inline void write_csv(const SimLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);

  std::string line;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) line += ',';
    line += cols[i];
  }
  out << line << '\n';

  for (const SimRecord& r : log.records) {
    line.clear();
    auto num = [&line](double v) {
      detail::append_number(line, v);
      line += ',';
    };
    num(r.t);
    for (int i = 0; i < kNumJoints; ++i) num(r.q[i]);
    num(r.eta);
    for (const Vec3* v : {&r.x_ee, &r.x_ins, &r.x_rcm, &r.x_trocar, &r.x_des,
                          &r.f_rcm_true, &r.f_ins_true, &r.f_rcm_hat,
                          &r.f_ins_hat}) {
      num((*v)[0]);
      num((*v)[1]);
      num((*v)[2]);
    }
    num(r.gamma_hat);
    line += std::to_string(static_cast<int>(r.load_case));
    line += ',';
    num(r.e_rcm);
    detail::append_number(line, r.e_ins);
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Parses a log written by write_csv. Only the columns carried by the file
/// are reconstructed; per-step rates and raw wrenches are not serialized.
inline SimLog read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);

  std::string header;
  if (!std::getline(in, header)) {
    throw ConfigError("CSV schema mismatch: empty file " + path);
  }
  {
    std::string expected;
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) expected += ',';
      expected += cols[i];
    }
    if (header != expected) {
      throw ConfigError("CSV schema mismatch in " + path);
    }
  }

  SimLog log;
  std::string row;
  std::size_t line_no = 1;
  std::vector<std::string> fields;
  while (std::getline(in, row)) {
    ++line_no;
    if (row.empty()) continue;
    fields.clear();
    std::size_t begin = 0;
    while (begin <= row.size()) {
      const std::size_t comma = row.find(',', begin);
      if (comma == std::string::npos) {
        fields.push_back(row.substr(begin));
        break;
      }
      fields.push_back(row.substr(begin, comma - begin));
      begin = comma + 1;
    }
    if (fields.size() != csv_columns().size()) {
      throw ConfigError("CSV line " + std::to_string(line_no) +
                        ": expected " + std::to_string(csv_columns().size()) +
                        " fields, got " + std::to_string(fields.size()));
    }

    SimRecord r;
    std::size_t k = 0;
    auto num = [&]() { return detail::parse_number(fields[k++], line_no); };
    r.t = num();
    for (int i = 0; i < kNumJoints; ++i) r.q[i] = num();
    r.eta = num();
    for (Vec3* v : {&r.x_ee, &r.x_ins, &r.x_rcm, &r.x_trocar, &r.x_des,
                    &r.f_rcm_true, &r.f_ins_true, &r.f_rcm_hat,
                    &r.f_ins_hat}) {
      (*v)[0] = num();
      (*v)[1] = num();
      (*v)[2] = num();
    }
    r.gamma_hat = num();
    r.load_case = static_cast<LoadCase>(
        static_cast<int>(detail::parse_number(fields[k++], line_no)));
    r.e_rcm = num();
    r.e_ins = num();
    log.records.push_back(r);
  }
  if (log.records.size() >= 2) {
    log.dt = log.records[1].t - log.records[0].t;
  }
  return log;
}

}  // namespace rcmsim
