#include "stylecodec/image.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stylecodec {

void validate_image(const Tensor& img) {
  std::vector<std::string> faults;
  if (img.c != 3) faults.push_back("expected 3 channels, got " + std::to_string(img.c));
  if (img.h != img.w)
    faults.push_back("expected square image, got " + std::to_string(img.h) + "x" + std::to_string(img.w));
  if (img.h <= 0 || img.h % 8 != 0)
    faults.push_back("side must be a positive multiple of 8, got " + std::to_string(img.h));
  for (std::size_t i = 0; i < img.size(); ++i) {
    double x = img.v[i];
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      faults.push_back("value out of [0,1] at flat index " + std::to_string(i));
      break;
    }
  }
  if (!faults.empty()) {
    std::string msg = "invalid image:";
    for (const auto& f : faults) msg += " " + f + ";";
    throw ValidationError(msg);
  }
}

bool is_valid_image(const Tensor& img) {
  try {
    validate_image(img);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

double quantize_8bit(double v) { return std::round(v * 255.0) / 255.0; }

void save_image(const Tensor& img, const std::string& path) {
  validate_image(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P6\n" << img.w << " " << img.h << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.w) * 3);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x)
      for (int ch = 0; ch < 3; ++ch)
        row[static_cast<std::size_t>(x) * 3 + ch] =
            static_cast<unsigned char>(std::lround(img.at(ch, y, x) * 255.0));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw IoError("write failed: " + path);
}

namespace {

// Skips PPM whitespace and '#' comments between header tokens.
void skip_ppm_space(std::istream& in) {
  for (;;) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      in.get();
    } else {
      return;
    }
  }
}

}  // namespace

Tensor load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P6") throw IoError("not a binary PPM file: " + path);
  int w = 0, h = 0, maxval = 0;
  skip_ppm_space(in);
  in >> w;
  skip_ppm_space(in);
  in >> h;
  skip_ppm_space(in);
  in >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PPM header: " + path);
  in.get();  // the single whitespace byte after maxval
  Tensor img(3, h, w);
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * 3);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    if (!in) throw IoError("truncated PPM data: " + path);
    for (int x = 0; x < w; ++x)
      for (int ch = 0; ch < 3; ++ch)
        img.at(ch, y, x) = row[static_cast<std::size_t>(x) * 3 + ch] / 255.0;
  }
  return img;
}

}  // namespace stylecodec
