#include "ringcav/io.hpp"

#include <cstdio>
#include <json.hpp>

#include "ringcav/errors.hpp"

namespace ringcav {

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::uint64_t hash,
                     const std::vector<std::string>& columns,
                     const std::vector<std::string>& comments)
    : path_(path), out_(path) {
  if (!out_) throw Error("cannot write '" + path + "'");
  out_ << "# manifest_hash = " << hex_hash(hash) << "\n";
  for (const auto& c : comments) out_ << "# " << c << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

CsvWriter& CsvWriter::cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return cell(std::string(buf));
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!first_) out_ << ",";
  out_ << s;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::empty() { return cell(std::string()); }

void CsvWriter::end_row() {
  out_ << "\n";
  first_ = true;
}

void RunManifest::write(const std::string& path) const {
  nlohmann::ordered_json j;
  j["config_hash"] = hex_hash(config_hash);
  j["command"] = command;
  j["outputs"] = outputs;
  j["code_version"] = code_version;
  j["wall_time_s"] = wall_time_s;
  j["failures"] = failures;
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace ringcav
