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

#ifndef LATO_IMAGE_HPP_
#define LATO_IMAGE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lato/landmarks.hpp"

namespace lato {

// 8-bit grayscale image, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Binary PGM (P5, maxval <= 255). Throws Error(kIo) / Error(kSchema).
GrayImage ReadPgm(const std::string& path);
void WritePgm(const std::string& path, const GrayImage& image);

// Draws each landmark as a filled square dot of the given radius.
GrayImage DrawLandmarks(const GrayImage& image, const LandmarkSet& landmarks, int radius = 2,
                        std::uint8_t value = 255);

}  // namespace lato

#endif  // LATO_IMAGE_HPP_
