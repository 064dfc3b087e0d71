#include "expwalk/report.hpp"

#include "expwalk/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace expwalk {

std::string csv_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw DomainError("cli", "emit_plotdata", "row width does not match the header");
    rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

std::string CsvTable::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

namespace {

std::vector<std::size_t> select(const std::vector<std::string>& available, const std::vector<std::string>& wanted,
                                const std::vector<std::string>& fallback) {
    const auto& cols = wanted.empty() ? fallback : wanted;
    std::vector<std::size_t> idx;
    for (const auto& c : cols) {
        const auto it = std::find(available.begin(), available.end(), c);
        if (it == available.end()) throw DomainError("cli", "emit_plotdata", "missing column '" + c + "'");
        idx.push_back(static_cast<std::size_t>(it - available.begin()));
    }
    return idx;
}

}  // namespace

CsvTable emit_plotdata(const TrajectoryRecord& rec, const std::vector<std::string>& columns) {
    const std::vector<std::string> all{"step", "observable_name", "value", "running_avg"};
    const auto idx = select(all, columns, all);
    CsvTable t;
    for (auto i : idx) t.header.push_back(all[i]);
    for (std::size_t s = 0; s < rec.steps.size(); ++s)
        for (std::size_t o = 0; o < rec.names.size(); ++o) {
            const std::vector<std::string> cells{std::to_string(rec.steps[s]), rec.names[o],
                                                 csv_number(rec.values[o][s]), csv_number(rec.running[o][s])};
            std::vector<std::string> row;
            for (auto i : idx) row.push_back(cells[i]);
            t.add_row(std::move(row));
        }
    return t;
}

CsvTable emit_plotdata(const FlowTrace& trace, const std::vector<std::string>& columns) {
    std::vector<std::string> all{"t", "minima"};
    if (!trace.siegel.empty()) all.push_back("siegel");
    const auto idx = select(all, columns, {"t", "minima"});
    CsvTable t;
    for (auto i : idx) t.header.push_back(all[i]);
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        std::vector<std::string> row;
        for (auto i : idx) {
            const double v = i == 0 ? trace.t[k] : i == 1 ? trace.minima[k] : trace.siegel[k];
            row.push_back(csv_number(v));
        }
        t.add_row(std::move(row));
    }
    return t;
}

}  // namespace expwalk
