#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace ringcav {

inline constexpr const char* kVersion = "1.0.0";

std::string hex_hash(std::uint64_t h);

// CSV with '#'-prefixed header comments. The first comment line carries the
// run hash so every file can be traced to its manifest.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::uint64_t hash, const std::vector<std::string>& columns,
            const std::vector<std::string>& comments = {});
  CsvWriter& cell(double v);
  CsvWriter& cell(const std::string& s);
  CsvWriter& empty();
  void end_row();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  bool first_ = true;
};

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::string command;
  std::vector<std::string> outputs;
  std::string code_version = kVersion;
  double wall_time_s = 0.0;
  std::vector<std::string> failures;

  void write(const std::string& path) const;
};

}  // namespace ringcav
