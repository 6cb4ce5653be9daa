#include "ghostlab/objects.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace ghostlab {

namespace {

FieldGrid blank(int nx, int ny, double pitch_x, double pitch_y) {
  return ny == 1 ? FieldGrid(nx, pitch_x)
                 : FieldGrid(nx, ny, pitch_x, pitch_y);
}

}  // namespace

double TransmissionMask::transmissive_measure() const {
  std::size_t count = 0;
  for (const auto& v : values.values)
    if (std::abs(v) > 0.5) ++count;
  return double(count) * values.cell();
}

TransmissionMask identity_mask(int nx, int ny, double pitch_x,
                               double pitch_y) {
  TransmissionMask m{blank(nx, ny, pitch_x, pitch_y)};
  for (auto& v : m.values.values) v = Complex(1.0, 0.0);
  return m;
}

TransmissionMask double_slit_mask(int nx, int ny, double pitch_x,
                                  double pitch_y, double aperture_width,
                                  double needle_width, double height) {
  if (!(needle_width > 0.0) || needle_width >= aperture_width)
    throw std::invalid_argument(
        "double slit requires 0 < needle_width < aperture_width");
  TransmissionMask m{blank(nx, ny, pitch_x, pitch_y)};
  const auto& g = m.values;
  const double half_h =
      height > 0.0 ? height / 2.0 : g.ny() * (ny == 1 ? 0.0 : pitch_y);
  for (int iy = 0; iy < g.ny(); ++iy) {
    const double y = g.dim() == 2 ? (iy - g.center_y()) * pitch_y : 0.0;
    const bool in_h = g.dim() == 1 || std::abs(y) <= half_h;
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double x = std::abs((ix - g.center_x()) * pitch_x);
      const bool open =
          in_h && x > needle_width / 2.0 && x <= aperture_width / 2.0;
      m.values.at(ix, iy) = open ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    }
  }
  return m;
}

Pgm parse_pgm(const std::string& bytes) {
  // Tokenized header read that skips '#' comments.
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (std::isspace((unsigned char)bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace((unsigned char)bytes[pos]) &&
           bytes[pos] != '#')
      ++pos;
    if (start == pos) throw std::invalid_argument("truncated graymap header");
    return bytes.substr(start, pos - start);
  };
  auto next_int = [&](const char* what) {
    const std::string tok = next_token();
    try {
      std::size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      return v;
    } catch (...) {
      throw std::invalid_argument(std::string("bad graymap ") + what + ": " +
                                  tok);
    }
  };

  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5")
    throw std::invalid_argument("not a portable graymap (expected P2 or P5)");
  Pgm img;
  img.width = next_int("width");
  img.height = next_int("height");
  img.maxval = next_int("maxval");
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("graymap has empty raster");
  if (img.maxval <= 0 || img.maxval > 65535)
    throw std::invalid_argument("graymap maxval out of range [1, 65535]");
  const std::size_t n = std::size_t(img.width) * img.height;
  img.pixels.resize(n);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      int v = next_int("pixel");
      if (v > img.maxval) throw std::invalid_argument("pixel above maxval");
      img.pixels[i] = std::uint16_t(v);
    }
  } else {
    if (pos >= bytes.size() || !std::isspace((unsigned char)bytes[pos]))
      throw std::invalid_argument("missing raster separator");
    ++pos;  // exactly one whitespace byte before binary raster
    const int bpp = img.maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < n * bpp)
      throw std::invalid_argument("truncated graymap raster");
    for (std::size_t i = 0; i < n; ++i) {
      unsigned v;
      if (bpp == 1) {
        v = (unsigned char)bytes[pos + i];
      } else {
        v = ((unsigned char)bytes[pos + 2 * i] << 8) |
            (unsigned char)bytes[pos + 2 * i + 1];
      }
      if (int(v) > img.maxval) throw std::invalid_argument("pixel above maxval");
      img.pixels[i] = std::uint16_t(v);
    }
  }
  return img;
}

TransmissionMask bitmap_mask(int nx, int ny, double pitch_x, double pitch_y,
                             const std::string& pgm_bytes,
                             double physical_width) {
  if (!(physical_width > 0.0))
    throw std::invalid_argument("bitmap physical width must be positive");
  const Pgm img = parse_pgm(pgm_bytes);
  const double pixel = physical_width / img.width;
  const double physical_height = pixel * img.height;
  if (physical_width > nx * pitch_x ||
      (ny > 1 && physical_height > ny * pitch_y))
    throw std::invalid_argument("bitmap does not fit on the grid");
  TransmissionMask m{blank(nx, ny, pitch_x, pitch_y)};
  const auto& g = m.values;
  for (int iy = 0; iy < g.ny(); ++iy) {
    const double y = g.dim() == 2 ? (iy - g.center_y()) * pitch_y : 0.0;
    // image rows run top-down; +y maps to the top of the image
    const int row = int(std::floor(img.height / 2.0 - y / pixel));
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double x = (ix - g.center_x()) * pitch_x;
      const int col = int(std::floor(x / pixel + img.width / 2.0));
      double amp = 0.0;
      if (col >= 0 && col < img.width && row >= 0 && row < img.height)
        amp = double(img.pixels[std::size_t(row) * img.width + col]) /
              img.maxval;
      m.values.at(ix, iy) = Complex(amp, 0.0);
    }
  }
  return m;
}

TransmissionMask phase_mask(
    int nx, int ny, double pitch_x, double pitch_y,
    const std::function<double(double, double)>& phase) {
  TransmissionMask m{blank(nx, ny, pitch_x, pitch_y)};
  const auto& g = m.values;
  for (int iy = 0; iy < g.ny(); ++iy) {
    const double y = g.dim() == 2 ? (iy - g.center_y()) * pitch_y : 0.0;
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double x = (ix - g.center_x()) * pitch_x;
      const double p = phase(x, y);
      if (!std::isfinite(p))
        throw std::invalid_argument("phase profile must be finite on the grid");
      m.values.at(ix, iy) = std::polar(1.0, p);
    }
  }
  return m;
}

TransmissionMask phase_grating_mask(int nx, int ny, double pitch_x,
                                    double pitch_y, double period) {
  if (!(period > 0.0))
    throw std::invalid_argument("grating period must be positive");
  return phase_mask(nx, ny, pitch_x, pitch_y, [period](double x, double) {
    const double u = x / period - std::floor(x / period);
    return u < 0.5 ? 0.0 : std::numbers::pi;
  });
}

}  // namespace ghostlab
