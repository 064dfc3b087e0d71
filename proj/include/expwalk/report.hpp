#pragma once

// Plot-ready CSV emission with fixed formatting: 17 significant digits,
// LF line endings and a header row.

#include "expwalk/dioph.hpp"
#include "expwalk/lattices.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace expwalk {

/// Formats a double with 17 significant digits ("nan", "inf", "-inf" for
/// non-finite values).
std::string csv_number(double x);

/// Column-oriented table; every column has the same length.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    void write(std::ostream& out) const;
    std::string str() const;
};

/// Long format (step, observable_name, value, running_avg). `columns`
/// selects a subset of those four; an empty list selects all.
CsvTable emit_plotdata(const TrajectoryRecord& rec, const std::vector<std::string>& columns = {});

/// Columns drawn from t, minima and siegel; empty selects (t, minima).
CsvTable emit_plotdata(const FlowTrace& trace, const std::vector<std::string>& columns = {});

}  // namespace expwalk
