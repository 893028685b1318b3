#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mepol/types.hpp"

namespace mepol {

// serialize.hpp — deterministic writers.  Doubles print with %.17g so a
// given build reproduces byte-identical artifacts; JSON objects rely on
// nlohmann's sorted keys and shortest-round-trip doubles.

std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();

  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  struct Impl;
  Impl* impl_;
};

void write_json_file(const std::string& path, const nlohmann::json& j);
void ensure_directory(const std::string& path);

nlohmann::json complex_to_json(const Complex& z);       // [re, im]
nlohmann::json matrix3c_to_json(const Matrix3c& m);     // row-major [re, im]

}  // namespace mepol
