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

// Canonical JSON form of a CostHamiltonian:
//   {"n": 3, "offset": -0.5, "terms": [{"qubits": [0, 2], "coeff": 0.25}, ...]}
// Only the merged base view is written. nlohmann::json emits the shortest
// decimal that round-trips, so read(write(h)) reproduces every coefficient.

#include <string>

#include <json.hpp>

#include "iqa/problem.hpp"

namespace iqa {

inline nlohmann::json to_json(const CostHamiltonian& h) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : h.terms()) terms.push_back({{"qubits", t.qubits}, {"coeff", t.coefficient}});
    return {{"n", h.num_qubits()}, {"offset", h.offset()}, {"terms", std::move(terms)}};
}

inline CostHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
    try {
        const auto n = j.at("n").get<std::size_t>();
        const double offset = j.value("offset", 0.0);
        std::vector<BaseTerm> terms;
        for (const auto& t : j.at("terms")) {
            BaseTerm b{t.at("qubits").get<std::vector<Qubit>>(), t.at("coeff").get<double>()};
            std::sort(b.qubits.begin(), b.qubits.end());
            if (std::adjacent_find(b.qubits.begin(), b.qubits.end()) != b.qubits.end())
                throw InvalidArgument("JSON term repeats a qubit");
            terms.push_back(std::move(b));
        }
        return CostHamiltonian::from_base(n, std::move(terms), offset);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed Hamiltonian JSON: ") + e.what());
    }
}

inline std::string write_hamiltonian_json(const CostHamiltonian& h) { return to_json(h).dump(); }

inline CostHamiltonian read_hamiltonian_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed Hamiltonian JSON: ") + e.what());
    }
    return hamiltonian_from_json(j);
}

}  // namespace iqa
