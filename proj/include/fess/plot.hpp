// Copyright 2026 The FESS Authors. All Rights Reserved.
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

namespace fess {

struct CurvePoint {
  double x = 0.0;
  double mean = 0.0;
  double error = 0.0;  // half-length of the error bar
};

struct Curve {
  std::string label;
  std::vector<CurvePoint> points;
};

/// Renders curves as a standalone SVG document: one polyline per curve, a
/// vertical error bar at every point, a legend and the axis labels
/// "training samples" and "Dice coefficient". The y axis spans [0, 1].
/// Output depends only on the arguments. `comment`, when not empty, becomes
/// an XML comment on the first line.
std::string render_svg(const std::vector<Curve>& curves,
                       const std::string& comment = {});

/// Writes render_svg() to path. Throws ValidationError for an empty curve
/// list and IoError when the file cannot be written.
void emit_plot(const std::vector<Curve>& curves,
               const std::filesystem::path& path,
               const std::string& comment = {});

}  // namespace fess
