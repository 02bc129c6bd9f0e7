// Copyright 2026 The ECW Authors
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

#ifndef ECW_NNET_SNAPSHOT_H_
#define ECW_NNET_SNAPSHOT_H_

#include "json.hpp"

#include "ecw/nnet/net.h"

namespace ecw::nnet {

// {"layers": [{"w": [[...]], "b": [...]}], "heads": {"name": {"w", "b"}},
//  "adam": {"layers": [...], "heads": {...}}, "step": n}
nlohmann::json ToJson(const NetParams& params, const NetSpec& spec);
// Throws ConfigError if the document does not fit the spec's shapes.
NetParams ParamsFromJson(const nlohmann::json& doc, const NetSpec& spec);

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m);
nlohmann::json VectorToJson(const Eigen::VectorXd& v);
Eigen::MatrixXd MatrixFromJson(const nlohmann::json& doc);
Eigen::VectorXd VectorFromJson(const nlohmann::json& doc);

}  // namespace ecw::nnet

#endif  // ECW_NNET_SNAPSHOT_H_
