#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "components.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "rays.hpp"

#ifdef EXPMAP_HAVE_ZLIB
#include <zlib.h>
#endif

// Parameter-plane renderer: one classification per pixel, colored by
// attracting period. Rows are computed in parallel but written to disjoint
// slots, so the image is identical for any worker count.

namespace expmap {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb& o) const {
    return r == o.r && g == o.g && b == o.b;
  }
};

struct Palette {
  std::vector<Rgb> period;  // distinct colors for periods 1..size()
  Rgb high_period{150, 150, 150};
  Rgb undetermined{40, 40, 40};
  Rgb ray_overlay{250, 250, 250};
  Rgb internal_overlay{240, 70, 70};

  // escape shading: a smooth dark-to-light ramp in the step count
  Rgb escaping(int steps) const {
    double u = steps / (steps + 12.0);
    auto lerp = [u](double a, double b) {
      return (std::uint8_t)(a + (b - a) * u + 0.5);
    };
    return {lerp(6, 244), lerp(10, 240), lerp(38, 205)};
  }

  Rgb for_period(int p) const {
    if (p >= 1 && p <= (int)period.size()) return period[p - 1];
    return high_period;
  }
};

namespace detail {

// evenly spread hues, full saturation; v alternates slightly so neighboring
// periods differ in brightness as well as hue
inline Rgb hsv_byte(double h, double s, double v) {
  double c = v * s;
  double hh = h * 6.0;
  double x = c * (1.0 - std::abs(std::fmod(hh, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch ((int)hh % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
  }
  double m = v - c;
  return {(std::uint8_t)((r + m) * 255.0 + 0.5),
          (std::uint8_t)((g + m) * 255.0 + 0.5),
          (std::uint8_t)((b + m) * 255.0 + 0.5)};
}

}  // namespace detail

inline Palette default_palette(int period_cap) {
  Palette p;
  for (int k = 0; k < period_cap; ++k) {
    double hue = std::fmod(0.61803398875 * k, 1.0);
    double v = (k % 2) ? 0.72 : 0.92;
    p.period.push_back(detail::hsv_byte(hue, 0.82, v));
  }
  return p;
}

struct RenderSpec {
  Window window{-6.0, 6.0, -4.0, 4.0};
  int width = 800;
  int height = 600;
  int max_iter = 0;         // 0: take the config value
  double escape_radius = 0; // 0: take the config value
  int period_cap = 0;       // 0: take the config value
  Palette palette;          // empty period list: default palette
};

struct Image {
  int width = 0, height = 0;
  std::vector<Rgb> pixels;  // row-major, top row first
  Rgb& at(int x, int y) { return pixels[(size_t)y * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[(size_t)y * width + x]; }
};

inline Image render(const RenderSpec& spec, const Config& cfg = {}) {
  require(spec.width >= 1 && spec.height >= 1,
          "render: image must be at least 1x1");
  require(spec.window.re_lo < spec.window.re_hi &&
              spec.window.im_lo < spec.window.im_hi,
          "render: window is empty");
  Config run = cfg;
  if (spec.max_iter > 0) run.max_iter = spec.max_iter;
  if (spec.escape_radius > 0) run.escape_radius = spec.escape_radius;
  int cap = spec.period_cap > 0 ? spec.period_cap : cfg.period_cap;
  Palette pal = spec.palette;
  if (pal.period.empty()) pal = default_palette(cap);

  Image img;
  img.width = spec.width;
  img.height = spec.height;
  img.pixels.resize((size_t)spec.width * spec.height);
  const double dx = (spec.window.re_hi - spec.window.re_lo) / spec.width;
  const double dy = (spec.window.im_hi - spec.window.im_lo) / spec.height;

  auto shade = [&](const OrbitClassification& c) -> Rgb {
    if (auto* a = std::get_if<Attracting>(&c)) return pal.for_period(a->period);
    if (auto* i = std::get_if<Indifferent>(&c)) return pal.for_period(i->period);
    if (auto* e = std::get_if<Escaping>(&c)) return pal.escaping(e->steps);
    return pal.undetermined;
  };

  auto row = [&](int y) {
    double im = spec.window.im_hi - (y + 0.5) * dy;
    for (int x = 0; x < spec.width; ++x) {
      Complex kappa(spec.window.re_lo + (x + 0.5) * dx, im);
      Rgb color;
      try {
        color = shade(classify_singular_orbit(kappa, run));
      } catch (...) {
        color = pal.undetermined;
      }
      img.at(x, y) = color;
    }
  };

  unsigned workers = cfg.threads > 0 ? (unsigned)cfg.threads
                                     : std::thread::hardware_concurrency();
  if (workers < 1) workers = 1;
  if ((int)workers > spec.height) workers = spec.height;
  if (workers == 1) {
    for (int y = 0; y < spec.height; ++y) row(y);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) {
      pool.emplace_back([&] {
        for (int y = next.fetch_add(1); y < spec.height;
             y = next.fetch_add(1))
          row(y);
      });
    }
    for (auto& th : pool) th.join();
  }
  return img;
}

namespace detail {

inline void plot_segment(Image& img, const RenderSpec& spec, Complex a,
                         Complex b, Rgb color) {
  const double dx = (spec.window.re_hi - spec.window.re_lo) / img.width;
  const double dy = (spec.window.im_hi - spec.window.im_lo) / img.height;
  double ax = (a.real() - spec.window.re_lo) / dx;
  double ay = (spec.window.im_hi - a.imag()) / dy;
  double bx = (b.real() - spec.window.re_lo) / dx;
  double by = (spec.window.im_hi - b.imag()) / dy;
  int steps = (int)std::ceil(std::max(std::abs(bx - ax), std::abs(by - ay)));
  steps = std::max(steps, 1);
  for (int i = 0; i <= steps; ++i) {
    double u = (double)i / steps;
    int px = (int)std::floor(ax + (bx - ax) * u);
    int py = (int)std::floor(ay + (by - ay) * u);
    if (px >= 0 && px < img.width && py >= 0 && py < img.height)
      img.at(px, py) = color;
  }
}

}  // namespace detail

// Draw ray polylines over a rendered frame in the palette's reserved
// colors. Samples outside the window clip to nothing.
inline Image overlay_rays(Image img, const RenderSpec& spec,
                          const std::vector<ParameterRay>& rays,
                          const std::vector<InternalRay>& internal) {
  Palette pal = spec.palette;
  if (pal.period.empty())
    pal = default_palette(spec.period_cap > 0 ? spec.period_cap : 8);
  for (const auto& ray : rays)
    for (size_t i = 1; i < ray.samples.size(); ++i)
      detail::plot_segment(img, spec, ray.samples[i - 1].kappa,
                           ray.samples[i].kappa, pal.ray_overlay);
  for (const auto& ray : internal)
    for (size_t i = 1; i < ray.samples.size(); ++i)
      detail::plot_segment(img, spec, ray.samples[i - 1].kappa,
                           ray.samples[i].kappa, pal.internal_overlay);
  return img;
}

// ---- encoders ----

inline void write_ppm(const Image& img, std::ostream& out) {
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            (std::streamsize)img.pixels.size() * 3);
}

inline void write_ppm(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "write_ppm: cannot open " + path);
  write_ppm(img, f);
  require(f.good(), "write_ppm: write failed for " + path);
}

inline std::uint64_t image_hash(const Image& img) {
  // FNV-1a over the raw bytes; stable across runs by construction
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix((std::uint64_t)img.width);
  mix((std::uint64_t)img.height);
  for (const Rgb& p : img.pixels) {
    mix(p.r);
    mix(p.g);
    mix(p.b);
  }
  return h;
}

#ifdef EXPMAP_HAVE_ZLIB

namespace detail {

inline void png_chunk(std::ostream& out, const char type[4],
                      const std::vector<std::uint8_t>& data) {
  auto be32 = [&out](std::uint32_t v) {
    char b[4] = {(char)(v >> 24), (char)(v >> 16), (char)(v >> 8), (char)v};
    out.write(b, 4);
  };
  be32((std::uint32_t)data.size());
  out.write(type, 4);
  if (!data.empty())
    out.write(reinterpret_cast<const char*>(data.data()),
              (std::streamsize)data.size());
  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (!data.empty()) crc = crc32(crc, data.data(), (uInt)data.size());
  be32(crc);
}

}  // namespace detail

inline void write_png(const Image& img, std::ostream& out) {
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n',
                                      0x1a, '\n'};
  out.write(reinterpret_cast<const char*>(sig), 8);
  std::vector<std::uint8_t> ihdr(13);
  auto put32 = [](std::uint8_t* p, std::uint32_t v) {
    p[0] = (std::uint8_t)(v >> 24);
    p[1] = (std::uint8_t)(v >> 16);
    p[2] = (std::uint8_t)(v >> 8);
    p[3] = (std::uint8_t)v;
  };
  put32(ihdr.data(), (std::uint32_t)img.width);
  put32(ihdr.data() + 4, (std::uint32_t)img.height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // truecolor
  ihdr[10] = ihdr[11] = ihdr[12] = 0;
  detail::png_chunk(out, "IHDR", ihdr);

  // filter byte 0 in front of every scanline
  std::vector<std::uint8_t> raw;
  raw.reserve((size_t)img.height * (1 + (size_t)img.width * 3));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    for (int x = 0; x < img.width; ++x) {
      const Rgb& p = img.at(x, y);
      raw.push_back(p.r);
      raw.push_back(p.g);
      raw.push_back(p.b);
    }
  }
  uLongf bound = compressBound((uLong)raw.size());
  std::vector<std::uint8_t> idat(bound);
  int rc = compress2(idat.data(), &bound, raw.data(), (uLong)raw.size(), 9);
  require(rc == Z_OK, "write_png: deflate failed");
  idat.resize(bound);
  detail::png_chunk(out, "IDAT", idat);
  detail::png_chunk(out, "IEND", {});
}

inline void write_png(const Image& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), "write_png: cannot open " + path);
  write_png(img, f);
  require(f.good(), "write_png: write failed for " + path);
}

#endif  // EXPMAP_HAVE_ZLIB

}  // namespace expmap
