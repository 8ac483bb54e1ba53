#include "cqipred/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cqipred::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? std::string{}
                                                    : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

void write(const Table& table, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory for " + path.string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    auto put = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << fields[i];
        }
        out << '\n';
    };
    put(table.header);
    for (const auto& row : table.rows) put(row);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
        if (!have_header) {
            table.header = split(line);
            have_header = true;
        } else {
            table.rows.push_back(split(line));
        }
    }
    if (!have_header) throw std::runtime_error(path.string() + ": missing header row");
    return table;
}

} // namespace cqipred::csv
