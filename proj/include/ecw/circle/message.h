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

#ifndef ECW_CIRCLE_MESSAGE_H_
#define ECW_CIRCLE_MESSAGE_H_

#include <string>
#include <variant>

namespace ecw::circle {

struct DiscreteToken {
  int index = 0;
};

struct ContinuousScalar {
  double value = 0.0;
};

using Message = std::variant<DiscreteToken, ContinuousScalar>;

std::string ToString(const Message& message);

}  // namespace ecw::circle

#endif  // ECW_CIRCLE_MESSAGE_H_
