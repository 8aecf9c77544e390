#include "nids/dataset.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>

#include "text_util.hpp"

namespace nids {

namespace {

// RFC-4180 record reader: quoted fields, doubled quotes, CRLF, embedded
// newlines inside quotes.
class CsvReader {
public:
    CsvReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

    bool next(std::vector<std::string>& fields) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        ++line_;
        std::string field;
        bool quoted = false;
        bool was_quoted = false;
        for (;; c = in_.get()) {
            if (quoted) {
                if (c == EOF) throw DataError("unterminated quoted field starting on line " + std::to_string(line_));
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        quoted = false;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field.push_back(static_cast<char>(c));
                }
                continue;
            }
            if (c == EOF || c == '\n') {
                if (!field.empty() && field.back() == '\r' && !was_quoted) field.pop_back();
                fields.push_back(std::move(field));
                return true;
            }
            if (c == '\r' && in_.peek() == '\n') continue;
            if (c == delimiter_) {
                fields.push_back(std::move(field));
                field.clear();
                was_quoted = false;
            } else if (c == '"' && trim(field).empty()) {
                field.clear();
                quoted = true;
                was_quoted = true;
            } else {
                field.push_back(static_cast<char>(c));
            }
        }
    }

    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 0;
};

bool blank_record(const std::vector<std::string>& fields) {
    return fields.size() == 1 && trim(fields[0]).empty();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    return in;
}

std::vector<std::string> read_header(CsvReader& reader, const std::filesystem::path& path) {
    std::vector<std::string> header;
    if (!reader.next(header)) throw DataError("empty file (no header row): " + path.string());
    std::map<std::string, int> seen;
    if (header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) header[0].erase(0, 3);
    for (auto& name : header) name = std::string(trim(name));
    for (auto& name : header) {
        const int n = seen[name]++;
        if (n > 0) name += "." + std::to_string(n);
    }
    return header;
}

char parse_delimiter(const std::string& value) {
    if (value == "comma" || value == ",") return ',';
    if (value == "tab" || value == "\\t") return '\t';
    if (value == "semicolon") return ';';
    if (value == "pipe" || value == "|") return '|';
    if (value.size() == 1) return value[0];
    throw DataError("unsupported delimiter: " + value);
}

}  // namespace

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

RawTable load_csv(const std::filesystem::path& path, const std::string& label_column,
                  const CsvOptions& options) {
    // Pass 1: validate shape and infer column kinds without storing cells.
    std::vector<std::string> header;
    std::vector<bool> numeric;
    std::size_t rows = 0;
    {
        auto in = open_input(path);
        CsvReader reader(in, options.delimiter);
        header = read_header(reader, path);
        if (std::find(header.begin(), header.end(), label_column) == header.end())
            throw DataError("label column '" + label_column + "' not found in header of " + path.string());
        numeric.assign(header.size(), true);
        std::vector<std::string> fields;
        while (reader.next(fields)) {
            if (blank_record(fields)) continue;
            if (fields.size() != header.size()) {
                throw DataError("ragged row " + std::to_string(rows) + " (line " + std::to_string(reader.line()) +
                                "): expected " + std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
            }
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (numeric[c] && !trim(fields[c]).empty() && !parse_number(fields[c])) numeric[c] = false;
            }
            ++rows;
        }
    }

    RawTable table;
    table.label_column = label_column;
    table.rows = rows;
    table.columns.resize(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        auto& col = table.columns[c];
        col.name = header[c];
        col.kind = (numeric[c] && header[c] != label_column) ? ColumnKind::numeric : ColumnKind::categorical;
        if (col.kind == ColumnKind::numeric) {
            col.numbers.reserve(rows);
            col.missing.reserve(rows);
        } else {
            col.text.reserve(rows);
        }
    }

    // Pass 2: typed storage.
    auto in = open_input(path);
    CsvReader reader(in, options.delimiter);
    read_header(reader, path);
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (blank_record(fields)) continue;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            auto& col = table.columns[c];
            if (col.kind == ColumnKind::numeric) {
                const auto v = parse_number(fields[c]);
                col.numbers.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
                col.missing.push_back(!v.has_value());
            } else {
                col.text.emplace_back(trim(fields[c]));
            }
        }
    }
    return table;
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + '"';
    };
    for (const auto& name : d.feature_names) out << quote(name) << ',';
    out << "label\n";
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (double v : d.features.row(r)) out << format_number(v) << ',';
        out << d.labels[r] << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

SchemaAdapter load_schema(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw DataError("cannot read schema adapter " + path.string() + ": " + e.message());
    }
    SchemaAdapter schema;
    for (const auto& [key, node] : tree) {
        const std::string value = node.get_value<std::string>();
        if (key == "label_column") {
            schema.label_column = std::string(trim(value));
        } else if (key == "benign") {
            const auto items = split_list(value);
            schema.labels.benign = {items.begin(), items.end()};
        } else if (key == "attack") {
            const auto items = split_list(value);
            schema.labels.attack = {items.begin(), items.end()};
        } else if (key == "drop") {
            schema.drop_columns = split_list(value);
        } else if (key == "non_finite") {
            if (value == "reject") schema.non_finite = NonFinitePolicy::reject;
            else if (value == "drop") schema.non_finite = NonFinitePolicy::drop_row;
            else throw DataError("schema key non_finite must be 'reject' or 'drop', got '" + value + "'");
        } else if (key == "delimiter") {
            schema.delimiter = parse_delimiter(value);
        } else {
            throw DataError("unknown schema key '" + key + "' in " + path.string());
        }
    }
    return schema;
}

}  // namespace nids
