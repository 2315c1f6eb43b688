#include "lprotector/csv.hpp"

namespace lprotector {

DelimitedReader::DelimitedReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

bool DelimitedReader::next(std::vector<std::string>& fields) {
    fields.clear();
    if (in_.peek() == std::char_traits<char>::eof()) {
        return false;
    }
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;;) {
        const int raw = in_.get();
        if (raw == std::char_traits<char>::eof()) {
            fields.push_back(std::move(field));
            return true;
        }
        const char c = static_cast<char>(raw);
        if (quoted) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == delimiter_) {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\r' && in_.peek() == '\n') {
            // handled with the following '\n'
        } else if (c == '\n') {
            ++line_;
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
}

}  // namespace lprotector
