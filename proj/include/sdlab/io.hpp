// Copyright 2026 The sdlab Authors
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

// JSON forms of the library types. Matrices are
// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdlab/ensembles.hpp"
#include "sdlab/optimize.hpp"

namespace sdlab::io {

using json = nlohmann::json;

inline json to_json(const CMatrix& m) {
    json data = json::array();
    for (const auto& z : m.data()) data.push_back({z.real(), z.imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMatrix matrix_from_json(const json& j) {
    try {
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto& data = j.at("data");
        require(data.is_array() && data.size() == rows * cols, ErrorKind::Io,
                "matrix data has " + std::to_string(data.size()) + " entries, expected rows * cols");
        require(rows <= max_dim() && cols <= max_dim(), ErrorKind::SizeLimit, "matrix exceeds the dimension cap");
        CMatrix m(rows, cols);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& z = data[i];
            require(z.is_array() && z.size() == 2, ErrorKind::Io, "matrix entries must be [re, im]");
            m(i / cols, i % cols) = {z[0].get<double>(), z[1].get<double>()};
        }
        return m;
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, std::string("bad matrix JSON: ") + e.what());
    }
}

inline json to_json(const FunctionSpec& f) {
    return {{"n", f.n}, {"num_outputs", f.num_outputs}, {"table", f.table}, {"is_balanced", f.is_balanced}};
}

inline json to_json(const Ensemble& e) {
    json bases = json::array();
    for (const auto& u : e.bases.unitaries) bases.push_back(to_json(u));
    json states = json::array();
    for (const auto& s : e.states)
        states.push_back({{"y", s.y}, {"b", s.b}, {"p", s.p}, {"rho", to_json(s.rho)},
                          {"support_projector", to_json(s.support_projector)}});
    return {{"function", to_json(e.function)},
            {"bases", std::move(bases)},
            {"prior", {{"p_x", e.prior.p_x}, {"p_b", e.prior.p_b}}},
            {"states", std::move(states)}};
}

inline json to_json(const CertReport& r) {
    return {{"feasible", r.feasible},
            {"min_slack", r.min_slack},
            {"primal", r.primal_value},
            {"dual", r.dual_value},
            {"gap", r.gap}};
}

inline json to_json(const Povm& p) {
    json elements = json::array();
    for (const auto& e : p.elements) elements.push_back({{"label", e.label}, {"op", to_json(e.op)}});
    return {{"elements", std::move(elements)}};
}

inline json to_json(const DiscriminationProblem& p) {
    json terms = json::array();
    for (const auto& t : p.terms) terms.push_back({{"label", t.label}, {"weight", t.weight}, {"op", to_json(t.op)}});
    return {{"scale", p.scale}, {"terms", std::move(terms)}};
}

inline json to_json(const DualCertificate& c) {
    return {{"q", to_json(c.q)}, {"claimed_value", c.claimed_value}, {"dual_scale", c.dual_scale}};
}

inline Povm povm_from_json(const json& j) {
    try {
        Povm p;
        for (const auto& e : j.at("elements"))
            p.elements.push_back({e.at("label").get<std::string>(), matrix_from_json(e.at("op"))});
        return p;
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, std::string("bad POVM JSON: ") + e.what());
    }
}

inline DiscriminationProblem problem_from_json(const json& j) {
    try {
        std::vector<Term> terms;
        for (const auto& t : j.at("terms"))
            terms.push_back({t.at("label").get<std::string>(), t.value("weight", 1.0), matrix_from_json(t.at("op"))});
        return make_problem(std::move(terms), j.value("scale", 1.0));
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, std::string("bad problem JSON: ") + e.what());
    }
}

inline DualCertificate certificate_from_json(const json& j) {
    try {
        DualCertificate c;
        c.q = matrix_from_json(j.at("q"));
        c.dual_scale = j.value("dual_scale", 1.0);
        c.claimed_value = j.value("claimed_value", c.dual_scale * c.q.trace().real());
        return c;
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, std::string("bad certificate JSON: ") + e.what());
    }
}

/// A list of unitaries: either a bare array of matrices or {"bases": [...]}.
inline std::vector<CMatrix> bases_from_json(const json& j) {
    const json& list = j.is_object() && j.contains("bases") ? j.at("bases") : j;
    require(list.is_array() && !list.empty(), ErrorKind::Io, "bases file must hold a non-empty array of matrices");
    std::vector<CMatrix> out;
    for (const auto& m : list) out.push_back(matrix_from_json(m));
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::Io, path + ": " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorKind::Io, "cannot write " + path);
    out << text;
    out.flush();
    require(out.good(), ErrorKind::Io, "write failed for " + path);
}

}  // namespace sdlab::io
