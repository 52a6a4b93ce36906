#pragma once

#include <stdexcept>
#include <string>

namespace poipg {

// invalid graph construction or a query naming an unknown vertex
struct GraphError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// malformed conditional-independence statement or oracle query
struct CiError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// an oracle failed while answering; the message carries the query
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// two orientation demands contradict each other (fail-fast policy only)
struct ConflictError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// input text could not be parsed; line is 1-based, 0 when unknown
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line_no = 0)
        : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
    int line;
};

}  // namespace poipg
