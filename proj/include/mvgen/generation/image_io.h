#pragma once
/// @file image_io.h
/// @brief Deterministic PNG encoding of RGB frames.

#include <filesystem>
#include <string>
#include <string_view>

#include "mvgen/backends/protocol.h"

namespace mvgen {

/// 8-bit RGB PNG, no timestamps or text chunks, so equal frames encode to
/// equal bytes.
std::string encode_png(const Frame& frame);

/// Accepts 8-bit gray/RGB/RGBA (alpha dropped). Errors: MalformedClip.
Frame decode_png(std::string_view bytes);

void write_png(const std::filesystem::path& path, const Frame& frame);
Frame read_png(const std::filesystem::path& path);

}  // namespace mvgen
