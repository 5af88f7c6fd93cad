#include "klab/harness/report.hpp"

#include "klab/errors.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace klab::harness {

void Table::add(std::vector<std::string> row) {
    if (row.size() != columns.size())
        throw InvariantViolation("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                                 std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::string exact(const Ratio& r) { return r.to_string(); }
std::string decimal(const Ratio& r) { return r.to_decimal(12); }

void add_ratio_columns(std::vector<std::string>& columns, const std::string& name) {
    columns.push_back(name);
    columns.push_back(name + "_dec");
}

void add_ratio_cells(std::vector<std::string>& row, const Ratio& r) {
    row.push_back(exact(r));
    row.push_back(decimal(r));
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const Table& t, const std::string& header) {
    std::ostringstream os;
    os << header << '\n';
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
        os << '\n';
    };
    line(t.columns);
    for (const auto& r : t.rows) line(r);
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidityError("cannot write " + path);
    f << content;
    if (!f) throw ValidityError("write failed: " + path);
}

std::string header_line(const std::string& command, std::int64_t wall_ms) {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return "# lab " + command + " " + buf + " wall_ms=" + std::to_string(wall_ms);
}

} // namespace klab::harness
