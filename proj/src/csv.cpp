#include "chebclust/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace chebclust {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_number(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc() && result.ptr == end && !cell.empty();
}

double parse_finite(const std::string& cell, const std::string& where) {
    double v = 0.0;
    if (!parse_number(cell, v)) {
        throw ParseError("cannot parse number '" + cell + "' at " + where);
    }
    if (!std::isfinite(v)) {
        throw ParseError("non-finite value at " + where);
    }
    return v;
}

struct Line {
    int number;  // 1-based position in the stream
    std::vector<std::string> cells;
};

std::vector<Line> read_lines(std::istream& in) {
    std::vector<Line> lines;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (trim(raw).empty()) continue;
        lines.push_back({number, split_csv_line(raw)});
    }
    return lines;
}

SignalGroup ingest_wide(const std::vector<Line>& lines) {
    if (lines.size() < 2) {
        throw ParseError("wide layout needs a time row and at least one signal row");
    }
    const Line& head = lines.front();
    if (head.cells.size() < 2) {
        throw ParseError("time row needs at least one time column (line " +
                         std::to_string(head.number) + ")");
    }
    const int n_points = static_cast<int>(head.cells.size()) - 1;
    Eigen::VectorXd times(n_points);
    for (int j = 0; j < n_points; ++j) {
        times[j] = parse_finite(head.cells[j + 1],
                                "line " + std::to_string(head.number) + ", time column " +
                                    std::to_string(j + 1));
        if (j > 0 && !(times[j - 1] < times[j])) {
            throw ParseError("times must be strictly increasing at column " +
                             std::to_string(j + 1) + " (line " + std::to_string(head.number) +
                             ")");
        }
    }

    SignalGroup group;
    group.grid = Grid(times);
    group.samples.resize(lines.size() - 1, n_points);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const Line& line = lines[r];
        if (static_cast<int>(line.cells.size()) != n_points + 1) {
            throw ParseError("signal row has " + std::to_string(line.cells.size()) +
                             " cells, expected " + std::to_string(n_points + 1) + " (line " +
                             std::to_string(line.number) + ")");
        }
        if (line.cells[0].empty()) {
            throw ParseError("signal row without an id (line " + std::to_string(line.number) +
                             ")");
        }
        group.ids.push_back(line.cells[0]);
        for (int j = 0; j < n_points; ++j) {
            group.samples(r - 1, j) =
                parse_finite(line.cells[j + 1], "line " + std::to_string(line.number) +
                                                    ", signal '" + line.cells[0] + "'");
        }
    }
    validate(group);  // also rejects duplicate ids
    return group;
}

SignalGroup ingest_long(const std::vector<Line>& lines) {
    if (lines.empty()) {
        throw ParseError("long layout needs at least one (id, t, value) row");
    }
    std::size_t first = 0;
    {
        const Line& head = lines[0];
        double ignored;
        const bool header = head.cells.size() >= 3 && (!parse_number(head.cells[1], ignored) ||
                                                       !parse_number(head.cells[2], ignored));
        if (header) first = 1;
    }

    std::vector<std::string> order;                      // ids by first appearance
    std::map<std::string, std::map<double, double>> data;
    for (std::size_t r = first; r < lines.size(); ++r) {
        const Line& line = lines[r];
        if (line.cells.size() != 3) {
            throw ParseError("long layout rows need exactly id, t, value (line " +
                             std::to_string(line.number) + ")");
        }
        const std::string& id = line.cells[0];
        if (id.empty()) {
            throw ParseError("row without an id (line " + std::to_string(line.number) + ")");
        }
        const double t =
            parse_finite(line.cells[1], "line " + std::to_string(line.number) + ", time");
        const double v = parse_finite(line.cells[2], "line " + std::to_string(line.number) +
                                                         ", value of '" + id + "'");
        if (data.find(id) == data.end()) order.push_back(id);
        auto& series = data[id];
        if (!series.emplace(t, v).second) {
            throw ParseError("duplicate sample for id '" + id + "' at t=" + line.cells[1] +
                             " (line " + std::to_string(line.number) + ")");
        }
    }
    if (order.empty()) {
        throw ParseError("long layout contains no data rows");
    }

    std::vector<double> times;
    for (const auto& [t, v] : data[order.front()]) times.push_back(t);
    // The grid is the union of all times; every signal must then cover it.
    for (const auto& [id, series] : data) {
        for (const auto& [t, v] : series) {
            if (!std::binary_search(times.begin(), times.end(), t)) {
                times.insert(std::upper_bound(times.begin(), times.end(), t), t);
            }
        }
    }

    SignalGroup group;
    Eigen::VectorXd pts(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) pts[j] = times[j];
    group.grid = Grid(pts);
    group.samples.resize(order.size(), times.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto& series = data[order[r]];
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto it = series.find(times[j]);
            if (it == series.end()) {
                throw ParseError("signal '" + order[r] + "' is missing a sample at t=" +
                                 std::to_string(times[j]));
            }
            group.samples(r, j) = it->second;
        }
        group.ids.push_back(order[r]);
    }
    validate(group);
    return group;
}

}  // namespace

SignalGroup ingest_csv(std::istream& in, CsvLayout layout) {
    const std::vector<Line> lines = read_lines(in);
    return layout == CsvLayout::Wide ? ingest_wide(lines) : ingest_long(lines);
}

SignalGroup ingest_csv_file(const std::string& path, CsvLayout layout) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open input file '" + path + "'");
    }
    return ingest_csv(in, layout);
}

}  // namespace chebclust
