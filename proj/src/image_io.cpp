#include "tiqa/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace tiqa {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  }
  return f;
}

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

std::uint16_t quantize(float v, int max_value) {
  const double q = std::nearbyint(std::clamp(double(v), 0.0, 1.0) * max_value);
  return static_cast<std::uint16_t>(q);
}

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int depth = 0;
  std::vector<unsigned char> pixels;  // rows packed, 16-bit big-endian
};

// libpng reports errors by longjmp; this frame owns no C++ objects with
// destructors so the jump is safe. Returns false with `err` filled on error.
bool read_png_raw(std::FILE* f, RawPng& out, std::string& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                           png_error_fn, png_warning_fn);
  if (!png) {
    err = "png_create_read_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    err = "png_create_info_struct failed";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, f);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  const bool has_trns = png_get_valid(png, info, PNG_INFO_tRNS) != 0;
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if ((color & PNG_COLOR_MASK_ALPHA) || has_trns) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.pixels.resize(rowbytes * out.height);
  for (int y = 0; y < out.height; ++y) {
    png_read_row(png, out.pixels.data() + y * rowbytes, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

Image read_png(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  RawPng raw;
  std::string err;
  if (!read_png_raw(f.get(), raw, err)) {
    throw Error(ErrorKind::format,
                "cannot decode PNG '" + path.string() + "': " + err);
  }
  if (raw.channels != 1 && raw.channels != 3) {
    throw Error(ErrorKind::format, "unsupported PNG channel layout in '" +
                                       path.string() + "'");
  }
  Image img(raw.width, raw.height, raw.channels);
  const double scale = raw.depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  const std::size_t samples_per_row =
      static_cast<std::size_t>(raw.width) * raw.channels;
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      for (int c = 0; c < raw.channels; ++c) {
        const std::size_t i =
            y * samples_per_row + static_cast<std::size_t>(x) * raw.channels + c;
        const double v = raw.depth == 16
                             ? double((raw.pixels[2 * i] << 8) | raw.pixels[2 * i + 1])
                             : double(raw.pixels[i]);
        img.at(x, y, c) = static_cast<float>(v * scale);
      }
    }
  }
  return img;
}

bool write_png_raw(std::FILE* f, const RawPng& in, std::string& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                            png_error_fn, png_warning_fn);
  if (!png) {
    err = "png_create_write_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    err = "png_create_info_struct failed";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, in.width, in.height, in.depth,
               in.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t rowbytes =
      static_cast<std::size_t>(in.width) * in.channels * (in.depth / 8);
  for (int y = 0; y < in.height; ++y) {
    png_write_row(png, in.pixels.data() + y * rowbytes);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  const std::string magic = pnm_token(in);
  const int channels = magic == "P5" ? 1 : magic == "P6" ? 3 : 0;
  if (channels == 0) {
    throw Error(ErrorKind::format, "unsupported PNM variant '" + magic + "'");
  }
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(pnm_token(in));
    height = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw Error(ErrorKind::format, "malformed PNM header in '" + path.string() + "'");
  }
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorKind::format, "invalid PNM header in '" + path.string() + "'");
  }
  const int bytes = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(width) * height * channels;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error(ErrorKind::format, "truncated PNM data in '" + path.string() + "'");
  }
  Image img(width, height, channels);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c, ++i) {
        const unsigned v = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
        img.at(x, y, c) = static_cast<float>(std::min(1.0, double(v) / maxval));
      }
    }
  }
  return img;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), 8);
  if (probe.gcount() >= 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  if (probe.gcount() >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) {
    return read_pnm(path);
  }
  throw Error(ErrorKind::format,
              "'" + path.string() + "' is neither PNG nor binary PGM/PPM");
}

void write_png(const std::filesystem::path& path, const Image& image,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorKind::format, "PNG bit depth must be 8 or 16");
  }
  RawPng raw;
  raw.width = image.width();
  raw.height = image.height();
  raw.channels = image.channels();
  raw.depth = bit_depth;
  const int max_value = bit_depth == 16 ? 65535 : 255;
  const std::vector<float> samples = image.interleaved();
  raw.pixels.resize(samples.size() * (bit_depth / 8));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::uint16_t q = quantize(samples[i], max_value);
    if (bit_depth == 16) {
      raw.pixels[2 * i] = static_cast<unsigned char>(q >> 8);
      raw.pixels[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    } else {
      raw.pixels[i] = static_cast<unsigned char>(q);
    }
  }
  FilePtr f = open_file(path, "wb");
  std::string err;
  if (!write_png_raw(f.get(), raw, err)) {
    throw Error(ErrorKind::io, "cannot write PNG '" + path.string() + "': " + err);
  }
  if (std::fflush(f.get()) != 0) {
    throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
  }
}

void write_pnm(const std::filesystem::path& path, const Image& image,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorKind::format, "PNM bit depth must be 8 or 16");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  const int max_value = bit_depth == 16 ? 65535 : 255;
  out << (image.channels() == 3 ? "P6" : "P5") << '\n'
      << image.width() << ' ' << image.height() << '\n'
      << max_value << '\n';
  for (float v : image.interleaved()) {
    const std::uint16_t q = quantize(v, max_value);
    if (bit_depth == 16) out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xff));
  }
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

void write_image(const std::filesystem::path& path, const Image& image,
                 int bit_depth) {
  const auto ext = path.extension().string();
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_pnm(path, image, bit_depth);
  } else {
    write_png(path, image, bit_depth);
  }
}

std::string view_file_stem(int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "view_" + digits;
}

}  // namespace tiqa
