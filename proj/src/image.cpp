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

#include "lato/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include "lato/error.hpp"

namespace lato {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string HeaderToken(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok += static_cast<char>(c);
  }
  return tok;
}

}  // namespace

GrayImage ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open image " + path);
  if (HeaderToken(in) != "P5") throw Error(ErrorKind::kSchema, path + ": not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(HeaderToken(in));
    h = std::stoi(HeaderToken(in));
    maxval = std::stoi(HeaderToken(in));
  } catch (const std::exception&) {
    throw Error(ErrorKind::kSchema, path + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw Error(ErrorKind::kSchema, path + ": unsupported PGM dimensions or depth");
  }
  GrayImage img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw Error(ErrorKind::kIo, path + ": truncated pixel data");
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(std::lround(p * 255.0 / maxval));
  }
  return img;
}

void WritePgm(const std::string& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write image " + path);
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

GrayImage DrawLandmarks(const GrayImage& image, const LandmarkSet& landmarks, int radius,
                        std::uint8_t value) {
  GrayImage out = image;
  // Landmarks live on their own canvas; map onto the image grid.
  const double sx = static_cast<double>(image.width) / landmarks.canvas().width;
  const double sy = static_cast<double>(image.height) / landmarks.canvas().height;
  for (const Point& p : landmarks.points()) {
    const int cx = static_cast<int>(std::floor(p.x * sx));
    const int cy = static_cast<int>(std::floor(p.y * sy));
    for (int y = cy - radius; y <= cy + radius; ++y) {
      for (int x = cx - radius; x <= cx + radius; ++x) {
        if (x >= 0 && y >= 0 && x < out.width && y < out.height) out.at(x, y) = value;
      }
    }
  }
  return out;
}

}  // namespace lato
