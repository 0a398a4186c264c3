#pragma once

#include <qshape/error.hpp>
#include <qshape/geometry.hpp>

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qshape {

class BinaryMask {
 public:
  BinaryMask(int width, int height) : BinaryMask(width, height, std::vector<std::uint8_t>(checked_area(width, height), 0)) {}

  BinaryMask(int width, int height, std::vector<std::uint8_t> bits) : width_(width), height_(height), bits_(std::move(bits)) {
    if (bits_.size() != checked_area(width, height)) {
      throw Error(ErrorCode::TruncatedData, "mask bit count does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }

  // Out-of-range coordinates read as background.
  bool at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }

  void set(int x, int y, bool fg) { bits_.at(static_cast<std::size_t>(y) * width_ + x) = fg ? 1 : 0; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : bits_) c += b != 0;
    return c;
  }

  const std::vector<std::uint8_t>& bits() const { return bits_; }

 private:
  static std::size_t checked_area(int width, int height) {
    if (width < 1 || height < 1) throw Error(ErrorCode::CorruptHeader, "mask dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

namespace detail {

class PnmReader {
 public:
  explicit PnmReader(std::span<const std::uint8_t> bytes) : data_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char c = static_cast<char>(data_[pos_]);
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int header_int() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || !std::isdigit(data_[pos_])) {
      throw Error(ErrorCode::CorruptHeader, "expected a decimal header field");
    }
    long long v = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      v = v * 10 + (data_[pos_++] - '0');
      if (v > 1'000'000'000) throw Error(ErrorCode::CorruptHeader, "header field out of range");
    }
    return static_cast<int>(v);
  }

  // Plain-format sample; whitespace separated.
  int ascii_int() {
    skip_space_and_comments();
    if (pos_ >= data_.size()) throw Error(ErrorCode::TruncatedData, "pixel data ends early");
    if (!std::isdigit(data_[pos_])) throw Error(ErrorCode::CorruptHeader, "non-numeric pixel sample");
    long long v = 0;
    while (pos_ < data_.size() && std::isdigit(data_[pos_])) {
      v = v * 10 + (data_[pos_++] - '0');
      if (v > 65535) throw Error(ErrorCode::CorruptHeader, "pixel sample out of range");
    }
    return static_cast<int>(v);
  }

  // Plain PBM bits may be packed without separators.
  int ascii_bit() {
    skip_space_and_comments();
    if (pos_ >= data_.size()) throw Error(ErrorCode::TruncatedData, "pixel data ends early");
    const char c = static_cast<char>(data_[pos_++]);
    if (c != '0' && c != '1') throw Error(ErrorCode::CorruptHeader, "PBM bit must be 0 or 1");
    return c - '0';
  }

  // Raster data of binary formats starts after exactly one whitespace byte.
  void end_of_header() {
    if (pos_ >= data_.size() || !std::isspace(data_[pos_])) {
      throw Error(ErrorCode::CorruptHeader, "missing whitespace before raster");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::TruncatedData, "raster shorter than header declares");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Decodes a PBM (P1/P4) or PGM (P2/P5) file into a foreground mask.
///
/// PBM black pixels are foreground. PGM samples are rescaled to 0..255 and a pixel is foreground when its
/// value is below `threshold`. `invert` swaps foreground and background after binarization.
inline BinaryMask load_mask(std::span<const std::uint8_t> bytes, int threshold = 128, bool invert = false) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, "not a Netpbm file");
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '1' && kind != '2' && kind != '4' && kind != '5') {
    throw Error(ErrorCode::UnsupportedFormat, std::string("Netpbm variant P") + kind + " is not supported");
  }
  detail::PnmReader rd(bytes);
  rd.pos_ = 2;
  if (rd.pos_ < bytes.size() && !std::isspace(bytes[rd.pos_]) && bytes[rd.pos_] != '#') {
    throw Error(ErrorCode::CorruptHeader, "malformed magic number");
  }
  const int width = rd.header_int();
  const int height = rd.header_int();
  if (width < 1 || height < 1) throw Error(ErrorCode::CorruptHeader, "zero image dimension");
  int maxval = 1;
  const bool graymap = kind == '2' || kind == '5';
  if (graymap) {
    maxval = rd.header_int();
    if (maxval < 1) throw Error(ErrorCode::CorruptHeader, "maxval must be positive");
    if (maxval > 255) throw Error(ErrorCode::UnsupportedFormat, "16-bit graymaps are not supported");
  }

  const std::size_t area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> bits(area, 0);
  auto gray_fg = [&](int v) {
    if (v > maxval) throw Error(ErrorCode::CorruptHeader, "sample exceeds maxval");
    const int scaled = maxval == 255 ? v : (v * 255 + maxval / 2) / maxval;
    return scaled < threshold;
  };

  switch (kind) {
    case '1':
      for (std::size_t i = 0; i < area; ++i) bits[i] = static_cast<std::uint8_t>(rd.ascii_bit());
      break;
    case '2':
      for (std::size_t i = 0; i < area; ++i) bits[i] = gray_fg(rd.ascii_int());
      break;
    case '4': {
      rd.end_of_header();
      const std::size_t stride = (static_cast<std::size_t>(width) + 7) / 8;
      auto raster = rd.take(stride * height);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const std::uint8_t byte = raster[y * stride + x / 8];
          bits[static_cast<std::size_t>(y) * width + x] = (byte >> (7 - x % 8)) & 1;
        }
      }
      break;
    }
    case '5': {
      rd.end_of_header();
      auto raster = rd.take(area);
      for (std::size_t i = 0; i < area; ++i) bits[i] = gray_fg(raster[i]);
      break;
    }
  }
  if (invert) {
    for (auto& b : bits) b = b ? 0 : 1;
  }
  return BinaryMask(width, height, std::move(bits));
}

namespace detail {

// Moore neighbourhood in clockwise screen order (row index grows downwards), starting west.
inline constexpr std::array<std::array<int, 2>, 8> kMoore = {{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

inline int moore_index(int dx, int dy) {
  for (int d = 0; d < 8; ++d) {
    if (kMoore[d][0] == dx && kMoore[d][1] == dy) return d;
  }
  return -1;
}

struct Pixel {
  int x;
  int y;
  friend bool operator==(Pixel, Pixel) = default;
};

// Labels 8-connected foreground components; returns the pixels of the largest one in raster order.
inline std::vector<Pixel> largest_component(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<Pixel> best;
  std::vector<Pixel> current;
  std::vector<Pixel> stack;
  int next_label = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y) || label[static_cast<std::size_t>(y) * w + x] >= 0) continue;
      current.clear();
      stack.assign(1, Pixel{x, y});
      label[static_cast<std::size_t>(y) * w + x] = next_label;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        current.push_back(p);
        for (const auto& d : kMoore) {
          const int nx = p.x + d[0];
          const int ny = p.y + d[1];
          if (!mask.at(nx, ny)) continue;
          int& l = label[static_cast<std::size_t>(ny) * w + nx];
          if (l >= 0) continue;
          l = next_label;
          stack.push_back(Pixel{nx, ny});
        }
      }
      ++next_label;
      if (current.size() > best.size()) {
        std::sort(current.begin(), current.end(),
                  [](Pixel a, Pixel b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
        best = current;
      }
    }
  }
  return best;
}

// Drops repeated points and A-B-A fold-backs left by one-pixel-wide spurs.
inline std::vector<Point> prune_spurs(std::vector<Point> pts) {
  bool changed = true;
  while (changed && pts.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < pts.size() && pts.size() >= 3; ++i) {
      const std::size_t n = pts.size();
      const std::size_t next = (i + 1) % n;
      if (pts[i] == pts[next]) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(next));
        changed = true;
        break;
      }
      const std::size_t prev = (i + n - 1) % n;
      if (pts[prev] == pts[next]) {
        // Remove the spur tip and the duplicated return point.
        const std::size_t hi = std::max(i, next);
        const std::size_t lo = std::min(i, next);
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(hi));
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(lo));
        changed = true;
        break;
      }
    }
  }
  if (pts.size() == 2 && pts[0] == pts[1]) pts.pop_back();
  return pts;
}

}  // namespace detail

/// Outline of the largest 8-connected foreground component as pixel centres, counter-clockwise.
///
/// Moore-neighbour tracing with Jacob's stopping criterion, seeded at the top-most then left-most pixel.
/// Coordinates are (col + 0.5, height - row - 0.5), so y points up. Holes are ignored and one-pixel
/// spurs are pruned so the chain never folds back on itself.
inline std::vector<Point> trace_largest_boundary(const BinaryMask& mask) {
  using detail::kMoore;
  using detail::Pixel;
  const auto component = detail::largest_component(mask);
  if (component.empty()) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixels");

  // Component membership; the largest component is isolated from every other one by definition.
  auto inside = [&](int x, int y) { return mask.at(x, y); };

  const Pixel start = component.front();
  const int start_back = 0;  // west of the seed is background
  std::vector<Pixel> chain;
  Pixel p = start;
  int back = start_back;
  const std::size_t cap = 4 * static_cast<std::size_t>(mask.width()) * mask.height() + 16;
  for (std::size_t step = 0; step < cap; ++step) {
    chain.push_back(p);
    int found = -1;
    for (int t = 1; t <= 8; ++t) {
      const int d = (back + t) % 8;
      if (inside(p.x + kMoore[d][0], p.y + kMoore[d][1])) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const Pixel q{p.x + kMoore[found][0], p.y + kMoore[found][1]};
    const int prev = (found + 7) % 8;
    const int bx = p.x + kMoore[prev][0] - q.x;
    const int by = p.y + kMoore[prev][1] - q.y;
    back = detail::moore_index(bx, by);
    p = q;
    if (p == start && back == start_back) break;
  }

  std::vector<Point> pts;
  pts.reserve(chain.size());
  for (const Pixel& px : chain) {
    pts.push_back(Point{px.x + 0.5, mask.height() - px.y - 0.5});
  }
  pts = detail::prune_spurs(std::move(pts));
  if (pts.size() < 3) {
    throw Error(ErrorCode::ComponentTooSmall, "boundary has " + std::to_string(pts.size()) + " distinct pixels");
  }
  return ensure_ccw(std::move(pts));
}

namespace detail {

inline double turn_angle(Point prev, Point v, Point next) {
  const Point a = v - prev;
  const Point b = next - v;
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

}  // namespace detail

// Removes vertices whose turn angle is below eps until none remain; idempotent.
inline std::vector<Point> merge_collinear(std::vector<Point> pts, double eps) {
  if (pts.size() < 3) throw Error(ErrorCode::CollapsedPolygon, "need at least 3 points");
  std::vector<Point> dedup;
  dedup.reserve(pts.size());
  for (const Point& p : pts) {
    if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
  }
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  pts = std::move(dedup);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pts.size();) {
      if (pts.size() < 3) break;
      const std::size_t n = pts.size();
      const double beta = detail::turn_angle(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
      if (beta < eps) {
        pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
  }
  if (pts.size() < 3) throw Error(ErrorCode::CollapsedPolygon, "fewer than 3 vertices remain after merging");
  return pts;
}

}  // namespace qshape
