// Copyright 2026 The diqkd-sim Authors
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

#include <string>

#include "diqkd/pipeline.hpp"

namespace diqkd {

/// One JSON document; wall time only when include_timing is set, so that
/// reports are byte-identical for identical (config, seed).
std::string report_to_json(const KeyRateReport& report, bool include_timing = false);

/// The JSON document flattened to "key,value" rows with dotted keys.
std::string report_to_csv(const KeyRateReport& report, bool include_timing = false);

/// "# config_hash=<hash>", a header row, then one row per entry; doubles at
/// 17 significant digits.
std::string table_to_csv(const Table& table, const std::string& config_hash);

/// {"config_hash", "table", "columns", "rows"}.
std::string table_to_json(const Table& table, const std::string& config_hash);

const char* method_name(Method m);

}  // namespace diqkd
