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

#pragma once

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdlab/numkit.hpp"

namespace sdtest {

inline oracle::Mat to_oracle(const sdlab::CMatrix& m) {
    oracle::Mat out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

inline double max_diff(const sdlab::CMatrix& a, const oracle::Mat& b) {
    double worst = 0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
    return worst;
}

}  // namespace sdtest

#define EXPECT_SDLAB_ERROR(stmt, expected_kind)                                     \
    do {                                                                            \
        try {                                                                       \
            stmt;                                                                   \
            ADD_FAILURE() << "expected " << sdlab::to_string(expected_kind);        \
        } catch (const sdlab::Error& e) {                                           \
            EXPECT_EQ(e.kind(), expected_kind) << e.what();                         \
        }                                                                           \
    } while (0)
