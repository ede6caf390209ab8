// Copyright 2026 The QFL Authors.
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

#include <filesystem>
#include <string>
#include <vector>

namespace qfl {

struct SelftestOptions {
    /// Negates the metric under test; the metric-oracle property must fail.
    bool flip_metric_sign = false;
    /// MNIST directory; data-dependent checks are skipped if files are absent.
    std::filesystem::path data_dir;
};

struct PropertyResult {
    enum class Status { Pass, Fail, Skip };
    std::string name;
    Status status = Status::Pass;
    std::string detail;
};

std::vector<PropertyResult> run_selftest(const SelftestOptions &options);

std::string to_string(PropertyResult::Status status);

} // namespace qfl
