#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

namespace signlab::cli {

using Json = nlohmann::ordered_json;

enum class Format { table, csv, json };

/// What a subcommand produces. The same data is rendered three ways:
/// json as is, rows as CSV or as an aligned table. `text` replaces the
/// table rendering and `csv` the CSV rendering when set.
struct Output {
    Json json = Json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string text;
    std::string csv;

    // single-record helpers: one json key and one column in row 0
    void field(const std::string& key, Json value, std::string cell);
    void field(const std::string& key, std::uint64_t v);
    void field(const std::string& key, bool v);
    void field(const std::string& key, const std::string& v);
    void field(const std::string& key, const char* v) { field(key, std::string(v)); }
    void field(const std::string& key, const mpz_class& v);
    void field(const std::string& key, const mpq_class& v);
    void field(const std::string& key, const std::optional<std::uint64_t>& v);
    void number(const std::string& key, double v);
};

std::string render(const Output& out, Format fmt);

/// %.17g, enough to round-trip a double.
std::string fmt_double(double v);

std::string csv_escape(const std::string& cell);

}  // namespace signlab::cli
