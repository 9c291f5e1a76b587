// Copyright 2026 The lato Authors
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

#ifndef LATO_SRC_ASSETS_HPP_
#define LATO_SRC_ASSETS_HPP_

#include <string_view>

namespace lato::assets {

// Contents of assets/*.json, embedded at build time.
std::string_view CanonicalFaceJson();
std::string_view ExpressionFieldsJson();

}  // namespace lato::assets

#endif  // LATO_SRC_ASSETS_HPP_
