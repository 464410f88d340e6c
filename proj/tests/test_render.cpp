#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <sstream>

#include "expmap/io.hpp"
#include "expmap/reference.hpp"
#include "expmap/render.hpp"

using namespace expmap;

TEST_CASE("period-1 window renders period-1 and matches the closed form",
          "[render]") {
  RenderSpec spec;
  spec.window = {-2.5, -1.5, -0.2, 0.2};
  spec.width = 125;
  spec.height = 50;
  Config cfg;
  cfg.threads = 1;
  auto img = render(spec, cfg);
  REQUIRE((int)img.pixels.size() == spec.width * spec.height);

  Palette pal = default_palette(cfg.period_cap);
  const double dx = (spec.window.re_hi - spec.window.re_lo) / spec.width;
  const double dy = (spec.window.im_hi - spec.window.im_lo) / spec.height;
  int period1 = 0, agree = 0, total = spec.width * spec.height;
  std::vector<bool> member((size_t)total);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      Complex kappa(spec.window.re_lo + (x + 0.5) * dx,
                    spec.window.im_hi - (y + 0.5) * dy);
      member[(size_t)y * spec.width + x] =
          reference::in_period1_component(kappa, 0);
    }
  }
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      bool is_p1 = img.at(x, y) == pal.for_period(1);
      if (is_p1) ++period1;
      bool in = member[(size_t)y * spec.width + x];
      if (is_p1 == in)
        ++agree;
      else {
        // disagreements must hug the membership boundary: some neighbor
        // within one pixel lies on the other side
        bool boundary = false;
        for (int oy = -1; oy <= 1 && !boundary; ++oy) {
          for (int ox = -1; ox <= 1 && !boundary; ++ox) {
            int nx = x + ox, ny = y + oy;
            if (nx < 0 || nx >= spec.width || ny < 0 || ny >= spec.height)
              continue;
            if (member[(size_t)ny * spec.width + nx] != in) boundary = true;
          }
        }
        CHECK(boundary);
      }
    }
  }
  CHECK(period1 >= (total * 99) / 100);
  CHECK(agree >= (total * 99) / 100);
}

TEST_CASE("window right of the cusp mixes escape with a period-3 lobe",
          "[render]") {
  // real parameters above -1 escape, but the complex neighborhood is not
  // majority-escaping: a period-3 lobe (orbit far left -> near kappa ->
  // far right) straddles the real axis here and wins about half the area
  RenderSpec spec;
  spec.window = {3.0, 4.0, -0.2, 0.2};
  spec.width = 64;
  spec.height = 16;
  Config cfg;
  cfg.threads = 1;
  auto img = render(spec, cfg);
  Palette pal = default_palette(cfg.period_cap);
  int escaping = 0, period3 = 0;
  for (const Rgb& px : img.pixels) {
    if (px == pal.for_period(3)) {
      ++period3;
      continue;
    }
    bool named = px == pal.undetermined || px == pal.high_period;
    for (int p = 1; p <= cfg.period_cap && !named; ++p)
      if (px == pal.for_period(p)) named = true;
    if (!named) ++escaping;
  }
  int total = (int)img.pixels.size();
  CHECK(escaping > (total * 2) / 5);
  CHECK(period3 > (total * 2) / 5);
  CHECK(escaping + period3 == total);
}

TEST_CASE("single pixel at kappa = -2 is period 1", "[render]") {
  RenderSpec spec;
  spec.window = {-2.0005, -1.9995, -0.0005, 0.0005};
  spec.width = 1;
  spec.height = 1;
  auto img = render(spec);
  Palette pal = default_palette(Config{}.period_cap);
  CHECK(img.at(0, 0) == pal.for_period(1));
}

TEST_CASE("render is byte-identical across runs and worker counts",
          "[render]") {
  RenderSpec spec;
  spec.window = {-3.0, 1.0, -1.5, 1.5};
  spec.width = 80;
  spec.height = 60;
  Config one;
  one.threads = 1;
  Config three;
  three.threads = 3;
  auto a = render(spec, one);
  auto b = render(spec, three);
  auto c = render(spec, three);
  REQUIRE(a.pixels.size() == b.pixels.size());
  CHECK(std::memcmp(a.pixels.data(), b.pixels.data(),
                    a.pixels.size() * sizeof(Rgb)) == 0);
  CHECK(std::memcmp(b.pixels.data(), c.pixels.data(),
                    b.pixels.size() * sizeof(Rgb)) == 0);
  CHECK(image_hash(a) == image_hash(b));

  std::ostringstream pa, pb;
  write_ppm(a, pa);
  write_ppm(b, pb);
  CHECK(pa.str() == pb.str());
  CHECK(pa.str().rfind("P6\n80 60\n255\n", 0) == 0);
  CHECK(pa.str().size() == std::strlen("P6\n80 60\n255\n") + 80 * 60 * 3);
}

TEST_CASE("overlays draw rays where they belong", "[render]") {
  RenderSpec spec;
  spec.window = {-2.0, 4.0, -1.0, 1.0};
  spec.width = 90;
  spec.height = 30;
  Config cfg;
  cfg.threads = 1;
  auto base = render(spec, cfg);

  auto same = overlay_rays(base, spec, {}, {});
  CHECK(std::memcmp(base.pixels.data(), same.pixels.data(),
                    base.pixels.size() * sizeof(Rgb)) == 0);

  auto ray = trace_parameter_ray(external_address({}, {0}), 6.0, 0.1, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  auto w0 = period1_component(0);
  auto iray = internal_ray(w0, 0.0, -3.0, -0.05, cfg);
  REQUIRE(iray.status == CompStatus::Ok);
  auto drawn = overlay_rays(base, spec, {ray}, {iray});

  Palette pal = default_palette(cfg.period_cap);
  int white = 0, red = 0;
  int mid = spec.height / 2 - 1;  // the real axis straddles rows 14/15
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      if (drawn.at(x, y) == pal.ray_overlay) {
        ++white;
        CHECK((y == mid || y == mid + 1));
      }
      if (drawn.at(x, y) == pal.internal_overlay) {
        ++red;
        CHECK((y == mid || y == mid + 1));
      }
    }
  }
  // the external ray spans kappa in [G(0.1), G(6)], all on the real axis
  CHECK(white >= 20);
  // the internal ray covers [-3 - e^-3, -1ish]
  CHECK(red >= 10);
}

#ifdef EXPMAP_HAVE_ZLIB
TEST_CASE("png encoder emits a valid signature and stable bytes",
          "[render]") {
  RenderSpec spec;
  spec.window = {-2.0, 0.0, -0.5, 0.5};
  spec.width = 24;
  spec.height = 12;
  Config cfg;
  cfg.threads = 1;
  auto img = render(spec, cfg);
  std::ostringstream a, b;
  write_png(img, a);
  write_png(img, b);
  std::string bytes = a.str();
  REQUIRE(bytes.size() > 50);
  CHECK(bytes == b.str());
  const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  CHECK(std::memcmp(bytes.data(), sig, 8) == 0);
  CHECK(bytes.find("IHDR") == 12);
  CHECK(bytes.find("IEND") != std::string::npos);
}
#endif

TEST_CASE("ray csv matches the documented columns", "[render][io]") {
  Config cfg;
  auto addr = external_address({}, {0});
  auto ray = trace_parameter_ray(addr, 6.0, 1.0, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  auto csv = ray_csv(ray);
  CHECK(csv.rfind("t,re_kappa,im_kappa,residual,depth\n", 0) == 0);
  // one line per sample plus the header
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == ray.samples.size() + 1);
  CHECK(csv.find("\n6,") != std::string::npos);  // first sample at t = 6
  CHECK(ray_csv(ray) == csv);                    // deterministic
}

TEST_CASE("internal ray csv carries the multiplier", "[render][io]") {
  auto w0 = period1_component(0);
  auto ray = internal_ray(w0, 0.5, -2.0, -0.25);
  REQUIRE(ray.status == CompStatus::Ok);
  auto csv = internal_ray_csv(ray);
  CHECK(csv.rfind("t,re_kappa,im_kappa,re_mu,im_mu\n", 0) == 0);
  // mu = e^{t + i pi} is negative real: the line for t=-2 ends with ,-0.13..,0-ish
  CHECK(csv.find("\n-2,") != std::string::npos);
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == ray.samples.size() + 1);
}

TEST_CASE("ray summary json names the landing", "[render][io]") {
  Config cfg;
  auto addr = external_address({}, {0});
  auto ray = trace_parameter_ray(addr, 10.0, 0.02, cfg);
  REQUIRE(ray.status == RayStatus::Ok);
  ray.landing = estimate_landing(ray, cfg);
  REQUIRE(ray.landing->converged);
  auto j = ray_summary_json(addr, ray, cfg);
  CHECK(j["address"] == "[;0]");
  CHECK(j["status"] == "Ok");
  CHECK(j["landing"]["converged"] == true);
  double re = j["landing"]["estimate"]["re"].get<double>();
  CHECK(std::abs(re + 1.0) < 1e-3);
  CHECK(j["landing"]["errorBar"].get<double>() < 1e-2);
  // kappa = -1 is the parabolic root; the finite estimate may fall a hair
  // to either side of the boundary, so both labels are legitimate
  std::string cls = j["landing"]["classification"].get<std::string>();
  CHECK((cls == "Indifferent" || cls == "Attracting"));
  CHECK(j["landing"]["period"] == 1);
  CHECK(j.dump() == ray_summary_json(addr, ray, cfg).dump());
}

TEST_CASE("component json records the full picture", "[render][io]") {
  Config cfg;
  auto w0 = period1_component(0);
  auto boundary = boundary_trace(w0, 64, cfg);
  REQUIRE(boundary.status == CompStatus::Ok);
  std::vector<Bifurcation> kids;
  kids.push_back(bifurcation_child(w0, 1, 2, cfg));
  REQUIRE(kids[0].status == CompStatus::Ok);

  auto j = component_json(w0, &boundary, &kids);
  CHECK(j["period"] == 1);
  CHECK(j["branchTag"] == 0);
  CHECK(j["intermediateAddress"].is_null());
  CHECK(std::abs(j["seed"]["kappa"]["re"].get<double>() +
                 1.0 + std::exp(-1.0)) < 1e-12);
  CHECK(j["boundary"]["closed"] == false);
  CHECK(j["boundary"]["polyline"].size() == boundary.samples.size());
  CHECK(j["children"].size() == 1);
  CHECK(j["children"][0]["period"] == 2);
  CHECK(std::abs(j["children"][0]["attachment"]["im"].get<double>() - kPi) <
        1e-9);

  auto c2 = kids[0].child;
  c2.address = assign_intermediate_address(c2, cfg);
  c2.address_empirical = c2.address.has_value();
  auto jc = component_json(c2);
  CHECK(jc["intermediateAddress"] == "[0+1/2]");
  CHECK(jc["addressEmpirical"] == true);
}
