#include "output.hpp"

#include <algorithm>
#include <cstdio>

namespace signlab::cli {

void Output::field(const std::string& key, Json value, std::string cell) {
    json[key] = std::move(value);
    columns.push_back(key);
    if (rows.empty()) rows.emplace_back();
    rows.front().push_back(std::move(cell));
}

void Output::field(const std::string& key, std::uint64_t v) { field(key, Json(v), std::to_string(v)); }

void Output::field(const std::string& key, bool v) { field(key, Json(v), v ? "true" : "false"); }

void Output::field(const std::string& key, const std::string& v) { field(key, Json(v), v); }

void Output::field(const std::string& key, const mpz_class& v) { field(key, Json(v.get_str()), v.get_str()); }

void Output::field(const std::string& key, const mpq_class& v) { field(key, Json(v.get_str()), v.get_str()); }

void Output::field(const std::string& key, const std::optional<std::uint64_t>& v) {
    if (v) {
        field(key, *v);
    } else {
        field(key, Json(nullptr), "");
    }
}

void Output::number(const std::string& key, double v) { field(key, Json(v), fmt_double(v)); }

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
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

namespace {

std::string render_csv(const Output& o) {
    std::string s;
    for (std::size_t i = 0; i < o.columns.size(); ++i) s += (i ? "," : "") + csv_escape(o.columns[i]);
    s += "\n";
    for (const auto& row : o.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_escape(row[i]);
        s += "\n";
    }
    return s;
}

std::string render_table(const Output& o) {
    std::string s;
    if (o.rows.size() == 1) {
        // one record: key/value lines read better than a one-line table
        std::size_t w = 0;
        for (const auto& c : o.columns) w = std::max(w, c.size());
        for (std::size_t i = 0; i < o.columns.size(); ++i) {
            s += o.columns[i] + std::string(w - o.columns[i].size() + 2, ' ') + o.rows[0][i] + "\n";
        }
        return s;
    }
    std::vector<std::size_t> w(o.columns.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = o.columns[i].size();
    for (const auto& row : o.rows) {
        for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) w[i] = std::max(w[i], row[i].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        std::string l;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) l += "  ";
            l += std::string(w[i] - cells[i].size(), ' ') + cells[i];
        }
        return l + "\n";
    };
    s += line(o.columns);
    for (const auto& row : o.rows) s += line(row);
    return s;
}

}  // namespace

std::string render(const Output& out, Format fmt) {
    switch (fmt) {
        case Format::json:
            return out.json.dump(2) + "\n";
        case Format::csv:
            return out.csv.empty() ? render_csv(out) : out.csv;
        case Format::table:
        default:
            if (!out.text.empty()) return out.text.back() == '\n' ? out.text : out.text + "\n";
            return render_table(out);
    }
}

}  // namespace signlab::cli
