#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kqr/combinatorics.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/properties.hpp"
#include "kqr/rational.hpp"

namespace kqr {

using nlohmann::json;

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line_, int column_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ", column " + std::to_string(column_) +
                             ": " + what),
          line(line_),
          column(column_) {}
};

namespace detail {

/// Strips a trailing `# comment` and whitespace.
inline std::string strip(const std::string& raw) {
    std::string s = raw;
    auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

inline std::int64_t parse_int(const std::string& tok, int line, int col) {
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, col, "expected an integer, got '" + tok + "'");
    }
}

/// `key=value` field from a header line.
inline std::int64_t header_field(const std::string& header, const std::string& key, int line) {
    const std::string needle = key + "=";
    auto pos = header.find(needle);
    if (pos == std::string::npos) throw ParseError(line, 1, "missing header field '" + key + "='");
    auto end = header.find(' ', pos);
    std::string tok = header.substr(pos + needle.size(),
                                    end == std::string::npos ? std::string::npos : end - pos - needle.size());
    return parse_int(tok, line, static_cast<int>(pos) + 1);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// hypergraph files:  "hypergraph n=<n> r=<r>", one edge per line (sorted,
// 0-based, space separated), optional " x<mult>" suffix for multigraphs
// ---------------------------------------------------------------------------

struct HostFile {
    bool is_multi = false;
    RGraph graph;
    MultiRGraph multigraph;
};

inline HostFile read_hypergraph(std::istream& in) {
    HostFile out;
    std::string raw;
    int lineno = 0;
    std::string header;
    while (std::getline(in, raw)) {
        ++lineno;
        header = detail::strip(raw);
        if (!header.empty()) break;
    }
    if (header.rfind("hypergraph", 0) != 0) throw ParseError(lineno, 1, "expected 'hypergraph' header");
    const int n = static_cast<int>(detail::header_field(header, "n", lineno));
    const int r = static_cast<int>(detail::header_field(header, "r", lineno));
    if (n < 0 || r < 0) throw ParseError(lineno, 1, "negative n or r");
    out.graph = RGraph(n, r);
    out.multigraph = MultiRGraph(n, r);

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::strip(raw);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok) toks.push_back(tok);
        std::int64_t mult = 1;
        if (!toks.empty() && toks.back().size() > 1 && toks.back()[0] == 'x') {
            mult = detail::parse_int(toks.back().substr(1), lineno, 1);
            if (mult < 1) throw ParseError(lineno, 1, "multiplicity must be >= 1");
            if (mult > 1) out.is_multi = true;
            toks.pop_back();
        }
        if (static_cast<int>(toks.size()) != r)
            throw ParseError(lineno, 1, "expected " + std::to_string(r) + " vertices per edge, got " +
                                            std::to_string(toks.size()));
        VertexSet e;
        int col = 1;
        for (const auto& t : toks) {
            std::int64_t v = detail::parse_int(t, lineno, col);
            if (v < 0 || v >= n) throw ParseError(lineno, col, "vertex out of range");
            e.push_back(static_cast<int>(v));
            col += static_cast<int>(t.size()) + 1;
        }
        if (!is_sorted_set(e)) throw ParseError(lineno, 1, "edge not strictly sorted");
        out.multigraph.add(e, mult);
    }
    out.is_multi = false;
    for (const auto& [e, mult] : out.multigraph.multiplicities()) {
        if (mult > 1) out.is_multi = true;
        else out.graph.add(e);
    }
    if (out.is_multi) out.graph = RGraph(out.graph.n(), out.graph.r());
    return out;
}

inline void write_hypergraph(std::ostream& os, const RGraph& H) {
    os << "hypergraph n=" << H.n() << " r=" << H.r() << "\n";
    for (const auto& e : H.edges()) {
        for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
        os << "\n";
    }
}

inline void write_hypergraph(std::ostream& os, const MultiRGraph& M) {
    os << "hypergraph n=" << M.n() << " r=" << M.r() << "\n";
    for (const auto& [e, mult] : M.multiplicities()) {
        for (std::size_t i = 0; i < e.size(); ++i) os << (i ? " " : "") << e[i];
        if (mult != 1) os << " x" << mult;
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// design files:  "design n=<n> q=<q> r=<r> lambda=<l>", blocks one per
// line, each sorted, file in lexicographic block order
// ---------------------------------------------------------------------------

struct DesignFile {
    int n = 0;
    int q = 0;
    int r = 0;
    int lambda = 1;
    std::vector<VertexSet> blocks;
};

inline DesignFile read_design(std::istream& in) {
    DesignFile out;
    std::string raw;
    int lineno = 0;
    std::string header;
    while (std::getline(in, raw)) {
        ++lineno;
        header = detail::strip(raw);
        if (!header.empty()) break;
    }
    if (header.rfind("design", 0) != 0) throw ParseError(lineno, 1, "expected 'design' header");
    out.n = static_cast<int>(detail::header_field(header, "n", lineno));
    out.q = static_cast<int>(detail::header_field(header, "q", lineno));
    out.r = static_cast<int>(detail::header_field(header, "r", lineno));
    out.lambda = static_cast<int>(detail::header_field(header, "lambda", lineno));

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::strip(raw);
        if (line.empty()) continue;
        std::istringstream ss(line);
        VertexSet b;
        std::string tok;
        int col = 1;
        while (ss >> tok) {
            std::int64_t v = detail::parse_int(tok, lineno, col);
            if (v < 0 || v >= out.n) throw ParseError(lineno, col, "vertex out of range");
            b.push_back(static_cast<int>(v));
            col += static_cast<int>(tok.size()) + 1;
        }
        if (static_cast<int>(b.size()) != out.q)
            throw ParseError(lineno, 1, "expected " + std::to_string(out.q) + " vertices per block");
        if (!is_sorted_set(b)) throw ParseError(lineno, 1, "block not strictly sorted");
        out.blocks.push_back(std::move(b));
    }
    return out;
}

inline void write_design(std::ostream& os, const DesignFile& d) {
    os << "design n=" << d.n << " q=" << d.q << " r=" << d.r << " lambda=" << d.lambda << "\n";
    auto blocks = d.blocks;
    std::sort(blocks.begin(), blocks.end());
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
        os << "\n";
    }
}

// ---------------------------------------------------------------------------
// JSON reports: exact rationals appear as "num/den" strings plus a
// flagged decimal mirror
// ---------------------------------------------------------------------------

inline json rational_json(const Rational& r) {
    return json{{"exact", r.str()}, {"approx", r.to_double()}, {"is_exact", true}};
}

inline json approx_json(double x) {
    return json{{"exact", nullptr}, {"approx", x}, {"is_exact", false}};
}

inline json vertex_set_json(const VertexSet& s) {
    return json(s);
}

inline json property_report_json(const PropertyReport& rep) {
    json j;
    j["property"] = rep.property;
    j["vacuous"] = rep.vacuous;
    j["pass"] = rep.pass;
    j["sampled"] = rep.sampled;
    if (rep.sampled) j["sample_size"] = rep.sample_size;
    json measured = json::object();
    for (const auto& [key, val] : rep.measured) measured[key] = rational_json(val);
    j["measured"] = measured;
    json wit = json::object();
    for (const auto& [key, val] : rep.witnesses) wit[key] = vertex_set_json(val);
    j["witnesses"] = wit;
    j["notes"] = rep.notes;
    return j;
}

}  // namespace kqr
