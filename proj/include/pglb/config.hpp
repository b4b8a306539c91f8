#ifndef PGLB_CONFIG_HPP_
#define PGLB_CONFIG_HPP_

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "instruction.hpp"

namespace pglb {

// Settings read from a `key = value` file. Fields left unset keep whatever
// the caller already has.
struct Config {
    std::optional<std::uint64_t> maxr, maxn, step_limit, state_limit;
    std::optional<bool> cell_init, auto_bool_cells;
    std::vector<std::string> aux;
    std::vector<std::string> cells;

    void apply(ToolParams& tp) const {
        if (maxr) tp.maxr = *maxr;
        if (maxn) tp.maxn = *maxn;
        if (step_limit) tp.step_limit = *step_limit;
        if (state_limit) tp.state_limit = *state_limit;
        if (cell_init) tp.cell_init = *cell_init;
        if (auto_bool_cells) tp.auto_bool_cells = *auto_bool_cells;
        for (const auto& a : aux) tp.aux.add(a);
        for (const auto& c : cells) tp.cells[c] = false;
    }

    std::string str() const {
        std::ostringstream out;
        if (maxr) out << "maxr = " << *maxr << "\n";
        if (maxn) out << "maxn = " << *maxn << "\n";
        out << "aux = ";
        for (std::size_t i = 0; i < aux.size(); ++i) out << (i ? "," : "") << aux[i];
        out << "\n";
        if (!cells.empty()) {
            out << "cells = ";
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
            out << "\n";
        }
        if (step_limit) out << "stepLimit = " << *step_limit << "\n";
        if (state_limit) out << "stateLimit = " << *state_limit << "\n";
        if (cell_init) out << "cellInit = " << (*cell_init ? "true" : "false") << "\n";
        if (auto_bool_cells) out << "autocells = " << (*auto_bool_cells ? "true" : "false") << "\n";
        return out.str();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::uint64_t to_nat(const std::string& key, const std::string& v) {
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw std::invalid_argument("config: " + key + " expects a natural number, got '" + v + "'");
    return std::stoull(v);
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "T") return true;
    if (v == "false" || v == "0" || v == "F") return false;
    throw std::invalid_argument("config: " + key + " expects true/false, got '" + v + "'");
}

}  // namespace detail

inline Config parse_config(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        const auto val = detail::trim(line.substr(eq + 1));
        if (key == "maxr") c.maxr = detail::to_nat(key, val);
        else if (key == "maxn") c.maxn = detail::to_nat(key, val);
        else if (key == "stepLimit") c.step_limit = detail::to_nat(key, val);
        else if (key == "stateLimit") c.state_limit = detail::to_nat(key, val);
        else if (key == "cellInit") c.cell_init = detail::to_bool(key, val);
        else if (key == "autocells") c.auto_bool_cells = detail::to_bool(key, val);
        else if (key == "aux") c.aux = detail::split_list(val);
        else if (key == "cells") c.cells = detail::split_list(val);
        else throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return c;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace pglb

#endif  // PGLB_CONFIG_HPP_
