#include "mvgen/generation/image_io.h"

#include <png.h>

#include <csetjmp>
#include <cstring>

#include "mvgen/util/error.h"
#include "mvgen/util/files.h"

namespace mvgen {

namespace {

void png_write_to_string(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void png_flush_noop(png_structp) {}

struct ReadCursor {
  std::string_view bytes;
  std::size_t pos = 0;
};

void png_read_from_view(png_structp png, png_bytep data, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + length > cur->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(data, cur->bytes.data() + cur->pos, length);
  cur->pos += length;
}

void png_warn_ignore(png_structp, png_const_charp) {}

}  // namespace

std::string encode_png(const Frame& frame) {
  MVGEN_CHECK(frame.width > 0 && frame.height > 0, ErrorCode::MalformedClip, "frame has no pixels");
  MVGEN_CHECK(frame.rgb.size() == static_cast<std::size_t>(frame.width) * frame.height * 3,
              ErrorCode::MalformedClip, "frame buffer does not match its dimensions");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn_ignore);
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::MalformedClip, "PNG encoding failed");
  }
  {
    png_set_write_fn(png, &out, png_write_to_string, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(frame.width), static_cast<png_uint_32>(frame.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 3);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(frame.width) * 3;
    for (int y = 0; y < frame.height; ++y) {
      png_write_row(png, const_cast<png_bytep>(frame.rgb.data() + y * stride));
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

Frame decode_png(std::string_view bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw Error(ErrorCode::MalformedClip, "frame payload is not a PNG image");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_warn_ignore);
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes, 0};
  Frame frame;
  bool bad_layout = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::MalformedClip, "PNG decoding failed");
  }
  {
    png_set_read_fn(png, &cursor, png_read_from_view);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    frame.width = static_cast<int>(png_get_image_width(png, info));
    frame.height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(frame.width) * 3) {
      bad_layout = true;
    } else {
      frame.rgb.resize(static_cast<std::size_t>(frame.width) * frame.height * 3);
      for (int y = 0; y < frame.height; ++y) {
        png_read_row(png, frame.rgb.data() + static_cast<std::size_t>(y) * frame.width * 3, nullptr);
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (bad_layout) throw Error(ErrorCode::MalformedClip, "unsupported PNG pixel layout");
  return frame;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  write_file_atomic(path, encode_png(frame));
}

Frame read_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

}  // namespace mvgen
