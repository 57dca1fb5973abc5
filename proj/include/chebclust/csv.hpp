#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "chebclust/envelope.hpp"

namespace chebclust {

// Malformed input; the message names the offending line, id or time.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CsvLayout { Wide, Long };

// Wide layout: first row is a label cell followed by the N grid times, each
// further row a signal id followed by its N values. Long layout: rows of
// (id, t, value) with an optional header; the grid is the sorted union of
// times and every signal must cover all of it. Values must be finite,
// times strictly increasing, ids unique.
SignalGroup ingest_csv(std::istream& in, CsvLayout layout);
SignalGroup ingest_csv_file(const std::string& path, CsvLayout layout);

}  // namespace chebclust
