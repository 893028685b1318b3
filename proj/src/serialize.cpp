#include "mepol/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mepol/errors.hpp"

namespace mepol {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvWriter::Impl {
  std::ofstream out;
  size_t columns = 0;
};

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& columns)
    : impl_(new Impl) {
  impl_->out.open(path);
  if (!impl_->out) fail_input("csv: cannot open " + path + " for writing");
  impl_->columns = columns.size();
  for (size_t i = 0; i < columns.size(); ++i) {
    impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != impl_->columns) {
    fail_input("csv: row width does not match the header");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    impl_->out << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail_input("json: cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail_input("cannot create output directory " + path);
}

nlohmann::json complex_to_json(const Complex& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json matrix3c_to_json(const Matrix3c& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mepol
