// Copyright 2026 The agglab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agglab {

// Strips ASCII whitespace from both ends.
std::string trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(std::span<const std::string> parts, std::string_view sep);

std::string to_lower_ascii(std::string_view s);

// Fixed-point rendering with `digits` decimals ("0.919").
std::string format_fixed(double value, int digits);

}  // namespace agglab
