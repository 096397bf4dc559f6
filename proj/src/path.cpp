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

#include "sublevel/error.hpp"
#include "sublevel/path.hpp"

namespace sublevel {

ParamPath::ParamPath(Segment first) { segments_.push_back(std::move(first)); }

ParamPath ParamPath::unchecked(std::vector<Segment> segments) {
  require(!segments.empty(), ErrorCode::kInvalidArgument,
          "a path needs at least one segment");
  ParamPath p;
  p.segments_ = std::move(segments);
  return p;
}

void ParamPath::append(Segment s) {
  if (!exactly_equal(end(), s.start())) {
    fail(ErrorCode::kInternal,
         "segment " + std::to_string(segments_.size()) +
             " does not start where the path ends (gap " +
             std::to_string(max_abs_diff(end(), s.start())) + ")");
  }
  segments_.push_back(std::move(s));
}

void ParamPath::append(const ParamPath& other) {
  for (const Segment& s : other.segments_) append(s);
}

ParamPath ParamPath::reversed() const {
  ParamPath p;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    p.segments_.push_back(it->reversed());
  }
  return p;
}

}  // namespace sublevel
