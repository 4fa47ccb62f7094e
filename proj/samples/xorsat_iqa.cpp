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

// Runs both IQA selection rules and base QAOA on a max-XORSAT instance.
//
//   sample_xorsat_iqa [FILE.json]
//
// Without a file a random 3-XORSAT instance with n = m = 10 is used.

#include <fstream>
#include <iostream>
#include <sstream>

#include "iqa/generators.hpp"
#include "iqa/iqa_engine.hpp"
#include "iqa/serialization.hpp"

static std::string slurp(const char* path) {
    std::ifstream in(path);
    if (!in) throw iqa::Error(std::string("cannot open ") + path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int main(int argc, char** argv) {
    using namespace iqa;
    try {
        const CostHamiltonian h = argc > 1 ? xorsat_from_base(read_hamiltonian_json(slurp(argv[1])))
                                           : gen_random_xorsat(10, 3, 10, 2026);
        std::cout << h.num_qubits() << " qubits, " << h.logical_terms().size() << " terms\n";

        const auto base = run_base_qaoa(h, 2, {}, 1024, 1);
        std::cout << "base QAOA-2: expected ratio " << base.expected_ratio.value_or(0.0) << ", best of 1024 samples "
                  << base.best_sample_ratio.value_or(0.0) << "\n";

        for (auto rule : {SelectionRule::SingleZ, SelectionRule::LogicalTerm}) {
            IqaConfig cfg;
            cfg.rule = rule;
            cfg.stop_threshold = 3;
            const auto tr = run_iqa(h, cfg);
            std::cout << to_string(rule) << ": ratio " << tr.ratio.value_or(0.0) << " after " << tr.iterations.size()
                      << " iterations\n";
            for (const auto& it : tr.iterations)
                std::cout << "  n_free " << it.n_free << "  " << it.feature << "  <.> = " << it.expectation << "\n";
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
