#include "spincoh/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spincoh {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string CsvTable::serialize() const {
    std::string out;
    for (const std::string& m : meta) out += "# " + m + "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ",";
        out += columns[c];
    }
    out += "\n";
    char buf[40];
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::logic_error("CsvTable: row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            std::snprintf(buf, sizeof(buf), "%.15g", row[c]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f << body;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> CsvData::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] != name) continue;
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
    throw std::out_of_range("CSV has no column '" + name + "'");
}

CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    CsvData data;
    std::string line;
    bool header_done = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t colon = line.find(':');
            if (colon != std::string::npos) {
                std::string key = line.substr(1, colon - 1);
                std::string val = line.substr(colon + 1);
                while (!key.empty() && key.front() == ' ') key.erase(key.begin());
                while (!key.empty() && key.back() == ' ') key.pop_back();
                while (!val.empty() && val.front() == ' ') val.erase(val.begin());
                data.meta[key] = val;
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) data.columns.push_back(cell);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != data.columns.size())
            throw std::runtime_error("ragged CSV row in " + path.string());
        data.rows.push_back(std::move(row));
    }
    return data;
}

void Manifest::add(const std::filesystem::path& out_dir, const std::string& name) {
    std::ifstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("manifest: missing file " + name);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string body = ss.str();
    files.push_back(name);
    sizes_.push_back(std::to_string(body.size()));
    hashes_.push_back(hex64(fnv1a64(body)));
}

void Manifest::write(const std::filesystem::path& out_dir) const {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["files"] = nlohmann::json::array();
    for (std::size_t i = 0; i < files.size(); ++i)
        j["files"].push_back({{"name", files[i]},
                              {"bytes", std::stoull(sizes_[i])},
                              {"fnv1a64", hashes_[i]}});
    write_text_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

} // namespace spincoh
