#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace lprotector {

/// Streaming reader for delimiter-separated text with RFC 4180 quoting:
/// fields may be wrapped in double quotes, quoted fields may span lines, and
/// a doubled quote inside a quoted field is a literal quote. CRLF and LF line
/// endings are both accepted.
class DelimitedReader {
public:
    DelimitedReader(std::istream& in, char delimiter);

    /// Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields);

    /// 1-based physical line on which the last returned record started.
    std::size_t record_line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

}  // namespace lprotector
