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

// Reads a DIMACS CNF file and decides it with each branching rule.
//
//   sample_solve_dimacs FILE [rule ...]
//
// Rules are jw, first_order, qaoa<p> and split_qaoa<p>.

#include <fstream>
#include <iostream>
#include <sstream>

#include "iqa/dimacs.hpp"
#include "iqa/dpll.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: " << argv[0] << " FILE [rule ...]\n";
        return 4;
    }
    std::ifstream in(argv[1]);
    if (!in) {
        std::cerr << "cannot open " << argv[1] << "\n";
        return 1;
    }
    std::stringstream text;
    text << in.rdbuf();

    try {
        const auto f = iqa::parse_dimacs(text.str());
        std::vector<std::string> rules(argv + 2, argv + argc);
        if (rules.empty()) rules = {"jw", "first_order", "qaoa1", "split_qaoa1"};
        std::cout << f.num_variables << " variables, " << f.clauses.size() << " clauses\n";
        for (const auto& name : rules) {
            const auto rule = iqa::parse_branching_rule(name);
            const auto r = iqa::solve(f, rule);
            std::cout << name << ": " << (r.satisfiable ? "SAT" : "UNSAT") << " after " << r.branch_points
                      << " branch points" << (r.fallback_used ? " (fallback used)" : "") << "\n";
            if (r.satisfiable) {
                std::cout << "  v";
                for (std::size_t j = 0; j < f.num_variables; ++j) std::cout << ' ' << (r.assignment[j] > 0 ? "" : "-") << j + 1;
                std::cout << " 0\n";
            }
        }
    } catch (const iqa::ParseError& e) {
        std::cerr << argv[1] << ": " << e.what() << "\n";
        return 4;
    } catch (const iqa::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
