// Copyright 2026 The bcclust Authors.
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

#include "bcclust/imageseg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "bcclust/io.hpp"

namespace bcc {

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string_view bytes) : s_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  /// Unsigned decimal token; `what` names the field in error messages.
  std::uint64_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    if (pos_ >= s_.size()) throw ParseError(std::string("unexpected end of data reading ") + what, pos_);
    std::uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
      if (v > 0xffffffffULL) throw ParseError(std::string(what) + " out of range", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected a number for ") + what, start);
    if (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '#')
      throw ParseError(std::string("malformed ") + what, pos_);
    return v;
  }

  bool at_end() {
    skip_space_and_comments();
    return pos_ >= s_.size();
  }

  std::string_view rest() const { return s_.substr(pos_); }
  void advance(std::size_t k) { pos_ += k; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

void GrayImage::validate() const {
  if (width == 0 || height == 0) throw ConfigError("image dimensions must be positive");
  if (maxval == 0 || maxval > 65535) throw ConfigError("image maxval must be in [1, 65535]");
  if (intensities.size() != width * height)
    throw ConfigError("image has " + std::to_string(intensities.size()) + " intensities, expected " +
                      std::to_string(width * height));
  for (const double v : intensities)
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("image intensity outside [0, 1]");
}

GrayImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("not a PGM file (expected magic P2 or P5)", 0);
  const bool raw = bytes[1] == '5';
  PgmReader rd(bytes);
  rd.advance(2);
  if (rd.rest().empty() || !(std::isspace(static_cast<unsigned char>(rd.rest()[0])) || rd.rest()[0] == '#'))
    throw ParseError("missing whitespace after magic", 2);

  GrayImage img;
  const std::size_t width_at = rd.offset();
  const std::uint64_t w = rd.number("width");
  const std::uint64_t h = rd.number("height");
  if (w == 0 || h == 0) throw ParseError("image dimensions must be positive", width_at);
  const std::size_t maxval_at = rd.offset();
  const std::uint64_t maxval = rd.number("maxval");
  if (maxval == 0 || maxval > 65535) throw ParseError("maxval must be in [1, 65535]", maxval_at);
  img.width = static_cast<std::size_t>(w);
  img.height = static_cast<std::size_t>(h);
  img.maxval = static_cast<std::uint32_t>(maxval);
  const std::size_t count = img.width * img.height;
  img.intensities.resize(count);
  const double scale = static_cast<double>(maxval);

  if (raw) {
    // Exactly one whitespace byte separates the header from the raster.
    if (rd.rest().empty()) throw ParseError("missing raster after header", rd.offset());
    rd.advance(1);
    const std::size_t bps = maxval > 255 ? 2 : 1;
    const std::string_view data = rd.rest();
    const std::size_t available = data.size() / bps;
    if (available < count)
      throw ParseError("truncated raster: expected " + std::to_string(count) + " samples, found " +
                           std::to_string(available) + " (" + std::to_string(count - available) +
                           " missing)",
                       rd.offset() + available * bps);
    for (std::size_t k = 0; k < count; ++k) {
      std::uint32_t v = static_cast<unsigned char>(data[k * bps]);
      if (bps == 2) v = (v << 8) | static_cast<unsigned char>(data[k * bps + 1]);
      if (v > maxval) throw ParseError("sample exceeds maxval", rd.offset() + k * bps);
      img.intensities[k] = static_cast<double>(v) / scale;
    }
    return img;
  }

  for (std::size_t k = 0; k < count; ++k) {
    if (rd.at_end())
      throw ParseError("truncated raster: expected " + std::to_string(count) + " samples, found " +
                           std::to_string(k) + " (" + std::to_string(count - k) + " missing)",
                       rd.offset());
    const std::size_t at = rd.offset();
    const std::uint64_t v = rd.number("sample");
    if (v > maxval) throw ParseError("sample exceeds maxval", at);
    img.intensities[k] = static_cast<double>(v) / scale;
  }
  return img;
}

GrayImage load_grayscale(const std::string& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_pgm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.offset());
  }
}

std::uint32_t quantize(double intensity, std::uint32_t maxval) {
  const double v = std::floor(std::clamp(intensity, 0.0, 1.0) * maxval + 0.5);
  return static_cast<std::uint32_t>(std::min(v, static_cast<double>(maxval)));
}

std::string encode_pgm(const GrayImage& img, PgmFormat format) {
  img.validate();
  std::string out = format == PgmFormat::raw ? "P5\n" : "P2\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
         std::to_string(img.maxval) + "\n";
  if (format == PgmFormat::raw) {
    const bool wide = img.maxval > 255;
    out.reserve(out.size() + img.intensities.size() * (wide ? 2 : 1));
    for (const double v : img.intensities) {
      const std::uint32_t q = quantize(v, img.maxval);
      if (wide) out.push_back(static_cast<char>((q >> 8) & 0xff));
      out.push_back(static_cast<char>(q & 0xff));
    }
    return out;
  }
  // Plain format: one image row per group of lines, each line at most 70 chars.
  for (std::size_t r = 0; r < img.height; ++r) {
    std::size_t line = 0;
    for (std::size_t c = 0; c < img.width; ++c) {
      const std::string tok = std::to_string(quantize(img.at(r, c), img.maxval));
      if (line > 0 && line + 1 + tok.size() > 70) {
        out.push_back('\n');
        line = 0;
      }
      if (line > 0) {
        out.push_back(' ');
        ++line;
      }
      out += tok;
      line += tok.size();
    }
    out.push_back('\n');
  }
  return out;
}

void write_image(const GrayImage& img, const std::string& path, PgmFormat format) {
  write_file_atomic(path, encode_pgm(img, format));
}

ParticleSet image_to_particles(const GrayImage& img) {
  img.validate();
  const std::size_t n = img.width * img.height;
  std::vector<double> pos(2 * n);
  const double w = static_cast<double>(img.width);
  const double h = static_cast<double>(img.height);
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      const std::size_t i = r * img.width + c;
      pos[2 * i] = (static_cast<double>(c) + 0.5) / w;
      pos[2 * i + 1] = 1.0 - (static_cast<double>(r) + 0.5) / h;
    }
  }
  return ParticleSet(2, 1, std::move(pos), img.intensities);
}

GrayImage make_quadrant_image(std::size_t width, std::size_t height) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.intensities.resize(width * height);
  for (std::size_t r = 0; r < height; ++r) {
    const bool top = 2 * r < height;
    for (std::size_t c = 0; c < width; ++c) {
      const bool left = 2 * c < width;
      double v;
      if (left) v = top ? 1.0 : 0.75;
      else v = top ? 0.0 : 0.25;
      img.intensities[r * width + c] = v;
    }
  }
  img.validate();
  return img;
}

SegmentMethod parse_segment_method(std::string_view name) {
  if (name == "auto" || name == "automatic") return SegmentMethod::automatic;
  if (name == "euler") return SegmentMethod::euler;
  if (name == "mfi") return SegmentMethod::mfi;
  throw ConfigError("unknown segmentation method '" + std::string(name) + "'");
}

std::string_view to_string(SegmentMethod method) {
  switch (method) {
    case SegmentMethod::automatic: return "auto";
    case SegmentMethod::euler: return "euler";
    case SegmentMethod::mfi: return "mfi";
  }
  return "auto";
}

SegmentationResult segment(const GrayImage& img, const SegmentConfig& cfg) {
  cfg.spec.validate();
  if (!(cfg.spec.eps1 > 0.0) || !(cfg.spec.eps2 > 0.0))
    throw ConfigError("segmentation needs eps1 > 0 and eps2 > 0");
  const ParticleSet ps0 = image_to_particles(img);
  const std::size_t n = ps0.size();

  SegmentMethod method = cfg.method;
  if (method == SegmentMethod::automatic)
    method = n <= cfg.euler_max_pixels ? SegmentMethod::euler : SegmentMethod::mfi;

  SegmentationResult sr;
  sr.width = img.width;
  sr.height = img.height;
  sr.method_used = method;

  ParticleSet final_state = ps0;
  if (method == SegmentMethod::euler || n < 2) {
    IntegratorConfig ic = cfg.mfi.integrator();
    ic.record_every = ic.step_count() + 1;
    Trajectory tr = simulate(ps0, cfg.spec, ic);
    sr.steps = tr.steps;
    sr.termination_reason = tr.termination_reason;
    final_state = std::move(tr.final_state);
  } else {
    MfiConfig mc = cfg.mfi;
    mc.record_every = mc.integrator().step_count() + 1;
    Trajectory tr = mfi_simulate(ps0, cfg.spec, mc);
    sr.steps = tr.steps;
    sr.termination_reason = tr.termination_reason;
    final_state = std::move(tr.final_state);
  }

  const double tol = cfg.merge_tol > 0.0 ? cfg.merge_tol : default_merge_tol(ps0);
  const ClusterSet cs = extract_clusters(final_state, tol, cfg.spec);
  sr.labels = cs.labels();
  const std::size_t k = cs.size();
  sr.cluster_intensity.assign(k, 0.0);
  sr.cluster_size.assign(k, 0);
  sr.cluster_center.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Cluster& cl = cs.clusters[c];
    // Deviations from one member keep uniform clusters exact.
    const double ref = img.intensities[cl.members.front()];
    double sum = 0.0;
    for (const std::size_t i : cl.members) sum += img.intensities[i] - ref;
    sr.cluster_size[c] = cl.members.size();
    sr.cluster_intensity[c] =
        std::clamp(ref + sum / static_cast<double>(cl.members.size()), 0.0, 1.0);
    sr.cluster_center[c] = cl.center;
  }
  sr.output = img;
  for (std::size_t i = 0; i < n; ++i) sr.output.intensities[i] = sr.cluster_intensity[sr.labels[i]];
  return sr;
}

GrayImage threshold(const SegmentationResult& sr, double theta) {
  GrayImage out = sr.output;
  for (std::size_t i = 0; i < out.intensities.size(); ++i)
    out.intensities[i] = sr.cluster_intensity[sr.labels[i]] < theta ? 0.0 : 1.0;
  return out;
}

}  // namespace bcc
