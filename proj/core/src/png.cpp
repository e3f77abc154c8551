#include "bindbench/png.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <zlib.h>

#include "bindbench/error.hpp"

namespace bindbench {
namespace {

constexpr std::array<unsigned char, 8> kSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])); };
  return b(0) << 24 | b(1) << 16 | b(2) << 8 | b(3);
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(
                   crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorCode::IoError, "png: " + why); }

}  // namespace

std::string encode_png(const Image& image) {
  std::string raw;
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  raw.reserve((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(image.rgb.data()) + y * stride, stride);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string z(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &bound, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK) {
    bad("deflate failed");
  }
  z.resize(bound);

  std::string out(reinterpret_cast<const char*>(kSignature.data()), kSignature.size());
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(image.width));
  put_u32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr += std::string{'\x08', '\x02', '\0', '\0', '\0'};
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", z);
  put_chunk(out, "IEND", "");
  return out;
}

Image decode_png(std::string_view in) {
  if (in.size() < 8 || std::memcmp(in.data(), kSignature.data(), 8) != 0) bad("bad signature");
  std::size_t at = 8;
  int width = 0, height = 0, channels = 0;
  std::string idat;
  while (at + 12 <= in.size()) {
    std::uint32_t len = get_u32(in, at);
    if (at + 12 + len > in.size()) bad("truncated chunk");
    std::string_view type = in.substr(at + 4, 4);
    std::string_view data = in.substr(at + 8, len);
    std::uint32_t crc = get_u32(in, at + 8 + len);
    if (crc != crc32(0L, reinterpret_cast<const Bytef*>(in.data() + at + 4), len + 4)) bad("crc mismatch");
    if (type == "IHDR") {
      if (len != 13) bad("bad IHDR");
      width = static_cast<int>(get_u32(data, 0));
      height = static_cast<int>(get_u32(data, 4));
      if (data[8] != 8 || data[12] != 0) bad("unsupported depth or interlace");
      if (data[9] == 2) {
        channels = 3;
      } else if (data[9] == 6) {
        channels = 4;
      } else {
        bad("unsupported color type");
      }
    } else if (type == "IDAT") {
      idat.append(data);
    } else if (type == "IEND") {
      break;
    }
    at += 12 + len;
  }
  if (channels == 0 || width <= 0 || height <= 0) bad("missing header");

  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  std::string raw((stride + 1) * height, '\0');
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(reinterpret_cast<Bytef*>(raw.data()), &raw_len, reinterpret_cast<const Bytef*>(idat.data()),
                 static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size()) {
    bad("inflate failed");
  }

  std::vector<std::uint8_t> prev(stride, 0), cur(stride);
  Image image(width, height);
  for (int y = 0; y < height; ++y) {
    const auto* row = reinterpret_cast<const std::uint8_t*>(raw.data()) + y * (stride + 1);
    int filter = row[0];
    for (std::size_t i = 0; i < stride; ++i) {
      int a = i >= static_cast<std::size_t>(channels) ? cur[i - channels] : 0;
      int b = prev[i];
      int c = i >= static_cast<std::size_t>(channels) ? prev[i - channels] : 0;
      int pred = 0;
      switch (filter) {
        case 0: pred = 0; break;
        case 1: pred = a; break;
        case 2: pred = b; break;
        case 3: pred = (a + b) / 2; break;
        case 4: pred = paeth(a, b, c); break;
        default: bad("bad filter");
      }
      cur[i] = static_cast<std::uint8_t>(row[1 + i] + pred);
    }
    for (int x = 0; x < width; ++x) image.set(x, y, {cur[x * channels], cur[x * channels + 1], cur[x * channels + 2]});
    std::swap(prev, cur);
  }
  return image;
}

}  // namespace bindbench
