#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>

#include "lesionforge/volume.hpp"

namespace lesionforge::nifti {

inline constexpr std::size_t kHeaderSize = 348;
/// Header plus the four-byte extension flag.
inline constexpr std::size_t kDataOffset = 352;

enum class Endianness { Little, Big };

enum Datatype : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kInt32 = 8,
  kFloat32 = 16,
  kFloat64 = 64,
};

enum class OutputDatatype { Float32, Float64 };

/// Decoded NIfTI-1 header. `raw` keeps all 348 bytes in little-endian order
/// so fields this library does not interpret (orientation, descrip, intent)
/// survive a read/write cycle verbatim.
struct NiftiHeader {
  std::int32_t sizeof_hdr = 348;
  std::array<std::int16_t, 8> dim{};
  std::int16_t datatype = 0;
  std::int16_t bitpix = 0;
  std::array<float, 8> pixdim{};
  float vox_offset = 0.0f;
  float scl_slope = 0.0f;
  float scl_inter = 0.0f;
  std::array<char, 4> magic{};
  Endianness endianness = Endianness::Little;
  std::array<std::uint8_t, kHeaderSize> raw{};

  Dims dims() const noexcept;
  Spacing spacing() const noexcept;
};

/// Parses the first 348 bytes. The byte order is the one under which dim[0]
/// lies in [1, 7]. Throws corrupt-header when neither order qualifies or
/// sizeof_hdr is not 348, and format when the magic is not "n+1\0".
NiftiHeader parse_header(std::span<const std::byte> bytes);

/// Serialises `header` back into 348 little-endian bytes, starting from
/// header.raw and overwriting the decoded fields.
std::array<std::uint8_t, kHeaderSize> encode_header(const NiftiHeader& header);

/// Reverses the byte order of every multi-byte header field.
std::array<std::uint8_t, kHeaderSize> byteswap_header(
    std::span<const std::uint8_t, kHeaderSize> little_endian);

/// Reads a .nii or .nii.gz file (gzip detected from the content). Values are
/// scaled by scl_slope/scl_inter when the slope is non-zero.
std::pair<Volume3D, NiftiHeader> read_volume(const std::filesystem::path& path);

/// Writes a little-endian single-file NIfTI-1 volume, gzip-compressed when
/// the path ends in ".gz". Orientation and other uninterpreted fields are
/// copied from `like` when given.
void write_volume(const Volume3D& vol, const std::filesystem::path& path,
                  OutputDatatype datatype = OutputDatatype::Float32,
                  const NiftiHeader* like = nullptr, int gzip_level = 6);

}  // namespace lesionforge::nifti
