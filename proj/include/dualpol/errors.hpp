// SPDX-License-Identifier: Apache-2.0
//
// dualpol: dual-structured precoding for dual-polarized massive MIMO downlinks
// Copyright (C) 2025 The dualpol authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace dualpol
{
    // Bad argument values (out-of-range, non-finite, mismatched sizes)
    class invalid_input : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Dimension constraints of a scenario cannot be met
    class config_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Solver or quadrature failure; carries the last residual when known
    class numerical_error : public std::runtime_error
    {
    public:
        numerical_error(const std::string &what, double residual = 0.0)
            : std::runtime_error(what), residual_(residual) {}
        double residual() const noexcept { return residual_; }

    private:
        double residual_;
    };
}
