// io.hpp — CSV/JSON emission, ingestion for fits, and the run manifest

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace spincoh {

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

// CSV with '#'-prefixed metadata lines, a header row, and %.15g numbers.
struct CsvTable {
    std::vector<std::string> meta;     // emitted as "# key: value"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string serialize() const;
};

void write_text_file(const std::filesystem::path& path, const std::string& body);

struct CsvData {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
};
CsvData read_csv(const std::filesystem::path& path);

// Every file a run produced, with size and content hash, keyed to the inputs.
struct Manifest {
    std::string command;
    std::string config_hash;  // hex FNV-1a of the canonical config text
    std::uint64_t seed = 0;
    std::vector<std::string> files;

    void add(const std::filesystem::path& out_dir, const std::string& name);
    void write(const std::filesystem::path& out_dir) const;

  private:
    std::vector<std::string> sizes_;
    std::vector<std::string> hashes_;
};

} // namespace spincoh
