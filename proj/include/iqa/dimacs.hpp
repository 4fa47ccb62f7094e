// Copyright 2026 The IQA-DPLL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// DIMACS CNF / WCNF reading and writing.

#include <charconv>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>

#include "iqa/problem.hpp"

namespace iqa {

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline bool parse_long(std::string_view tok, long long& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

inline bool parse_double(std::string_view tok, double& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

}  // namespace detail

/// Parses DIMACS "p cnf" or "p wcnf" text. External 1-based variables map to
/// 0-based indices; unweighted clauses get weight 1. Repeated identical
/// literals inside a clause are collapsed.
inline CnfFormula parse_dimacs(std::string_view text) {
    CnfFormula f;
    bool have_header = false;
    bool weighted = false;
    std::size_t line_no = 0;
    std::size_t clause_line = 0;
    Clause current;
    bool expecting_weight = true;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos) continue;
        line = line.substr(first);
        if (line[0] == 'c') continue;
        if (line[0] == '%') break;

        std::istringstream in{std::string(line)};
        if (line[0] == 'p') {
            if (have_header) throw ParseError(line_no, "duplicate problem line");
            std::string p, fmt, nv, nc;
            in >> p >> fmt >> nv >> nc;
            long long v = 0, c = 0;
            if (p != "p" || (fmt != "cnf" && fmt != "wcnf") || !detail::parse_long(nv, v) ||
                !detail::parse_long(nc, c) || v < 0 || c < 0)
                throw ParseError(line_no, "malformed problem line");
            weighted = (fmt == "wcnf");
            f.num_variables = static_cast<std::size_t>(v);
            f.clauses.reserve(static_cast<std::size_t>(c));
            have_header = true;
            continue;
        }
        if (!have_header) throw ParseError(line_no, "clause before problem line");

        std::string tok;
        while (in >> tok) {
            if (weighted && expecting_weight) {
                double w = 0.0;
                if (!detail::parse_double(tok, w) || w < 0.0) throw ParseError(line_no, "bad clause weight '" + tok + "'");
                current.weight = w;
                expecting_weight = false;
                clause_line = line_no;
                continue;
            }
            long long lit = 0;
            if (!detail::parse_long(tok, lit)) throw ParseError(line_no, "bad literal '" + tok + "'");
            if (lit == 0) {
                f.clauses.push_back(std::move(current));
                current = Clause{};
                expecting_weight = true;
                continue;
            }
            const long long var = std::llabs(lit);
            if (var > static_cast<long long>(f.num_variables))
                throw ParseError(line_no, "literal " + tok + " exceeds declared variable count");
            if (current.literals.empty()) clause_line = line_no;
            Literal l{static_cast<Qubit>(var - 1), lit > 0};
            if (std::find(current.literals.begin(), current.literals.end(), l) == current.literals.end())
                current.literals.push_back(l);
        }
    }
    if (!have_header) throw ParseError(line_no, "missing problem line");
    if (!current.literals.empty() || (weighted && !expecting_weight))
        throw ParseError(clause_line, "clause not terminated by 0");
    return f;
}

/// Writes "p cnf" when every weight is 1, otherwise "p wcnf" with the
/// shortest round-trip decimal weight before each clause.
inline std::string write_dimacs(const CnfFormula& f) {
    const bool weighted = std::any_of(f.clauses.begin(), f.clauses.end(),
                                      [](const Clause& c) { return c.weight != 1.0; });
    std::string out;
    out += weighted ? "p wcnf " : "p cnf ";
    out += std::to_string(f.num_variables) + " " + std::to_string(f.clauses.size()) + "\n";
    for (const auto& c : f.clauses) {
        if (weighted) out += detail::format_double(c.weight) + " ";
        for (const auto& l : c.literals) {
            const long long v = static_cast<long long>(l.variable) + 1;
            out += std::to_string(l.positive ? v : -v) + " ";
        }
        out += "0\n";
    }
    return out;
}

}  // namespace iqa
