// Copyright 2026 The sublevel Authors
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

#include <string>

#include <json.hpp>

#include "sublevel/certificate.hpp"
#include "sublevel/network.hpp"
#include "sublevel/path.hpp"
#include "sublevel/verify.hpp"

namespace sublevel {

using Json = nlohmann::json;

// Matrices are {"rows", "cols", "data"} with data in row-major order.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json activation_to_json(const Activation& a);
Activation activation_from_json(const Json& j);

Json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const Json& j);

Json theta_to_json(const Theta& theta);
Theta theta_from_json(const Json& j);

Json dataset_to_json(const DataSet& data);
DataSet dataset_from_json(const Json& j);

/// Full closed-form description: loading reproduces every sample bit for
/// bit. Chaining is not re-checked on load; verify_path reports gaps.
Json path_to_json(const ParamPath& path);
ParamPath path_from_json(const Json& j);

Json report_to_json(const PathReport& report);
Json certificate_to_json(const DisconnectionCertificate& cert);
Json barrier_to_json(const BarrierScan& scan);

/// Two-space indented text; floats printed with 17 significant digits and
/// non-finite values written as null.
std::string dump_json(const Json& j);
/// Throws kIo on malformed input.
Json parse_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sublevel
