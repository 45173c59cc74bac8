#include "lesionforge/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <zlib.h>

#include "lesionforge/error.hpp"

namespace lesionforge::nifti {
namespace {

// Byte offsets of the NIfTI-1 header fields used here.
constexpr std::size_t kOffSizeofHdr = 0;
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffMagic = 344;

struct FieldRun {
  std::size_t offset;
  std::size_t width;
  std::size_t count;
};

// Every multi-byte field of the 348-byte header, grouped into runs of
// same-width neighbours.
constexpr FieldRun kSwapRuns[] = {
    {0, 4, 1},    // sizeof_hdr
    {32, 4, 1},   // extents
    {36, 2, 1},   // session_error
    {40, 2, 8},   // dim
    {56, 4, 3},   // intent_p1..3
    {68, 2, 4},   // intent_code, datatype, bitpix, slice_start
    {76, 4, 11},  // pixdim[8], vox_offset, scl_slope, scl_inter
    {120, 2, 1},  // slice_end
    {124, 4, 6},  // cal_max, cal_min, slice_duration, toffset, glmax, glmin
    {252, 2, 2},  // qform_code, sform_code
    {256, 4, 18}, // quatern_b..d, qoffset_x..z, srow_x/y/z
};

template <typename T>
T byteswap_value(T v) {
  std::array<std::uint8_t, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  std::reverse(bytes.begin(), bytes.end());
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

template <typename T>
T load(const std::uint8_t* p, bool swap) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return swap ? byteswap_value(v) : v;
}

template <typename T>
T load_le(const std::uint8_t* p) {
  return load<T>(p, std::endian::native == std::endian::big);
}

template <typename T>
void store_le(std::uint8_t* p, T v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap_value(v);
  std::memcpy(p, &v, sizeof(T));
}

std::size_t element_size(std::int16_t datatype) {
  switch (datatype) {
    case kUint8: return 1;
    case kInt16: return 2;
    case kInt32: return 4;
    case kFloat32: return 4;
    case kFloat64: return 8;
    default:
      throw Error(ErrorKind::UnsupportedDatatype,
                  "datatype code " + std::to_string(datatype) + " is not supported");
  }
}

template <typename T>
void decode_elements(const std::uint8_t* src, std::size_t count, bool swap,
                     std::vector<double>& out) {
  for (std::size_t n = 0; n < count; ++n) {
    out[n] = static_cast<double>(load<T>(src + n * sizeof(T), swap));
  }
}

bool ends_with_gz(const std::filesystem::path& path) {
  const auto s = path.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "': no such file");
  }
  // gzread passes uncompressed content through unchanged.
  std::unique_ptr<gzFile_s, int (*)(gzFile)> file(gzopen(path.c_str(), "rb"), gzclose);
  if (!file) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  gzbuffer(file.get(), 1 << 17);
  std::vector<std::uint8_t> bytes;
  std::vector<std::uint8_t> chunk(1 << 20);
  for (;;) {
    const int got = gzread(file.get(), chunk.data(), static_cast<unsigned>(chunk.size()));
    if (got < 0) {
      int errnum = 0;
      const char* msg = gzerror(file.get(), &errnum);
      throw Error(ErrorKind::CorruptFile, "'" + path.string() + "': " + msg);
    }
    if (got == 0) break;
    bytes.insert(bytes.end(), chunk.begin(), chunk.begin() + got);
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes,
                int gzip_level) {
  if (ends_with_gz(path)) {
    const std::string mode = "wb" + std::to_string(std::clamp(gzip_level, 0, 9));
    gzFile file = gzopen(path.c_str(), mode.c_str());
    if (!file) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
    std::size_t done = 0;
    while (done < bytes.size()) {
      const auto step = static_cast<unsigned>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
      if (gzwrite(file, bytes.data() + done, step) != static_cast<int>(step)) {
        gzclose(file);
        throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
      }
      done += step;
    }
    if (gzclose(file) != Z_OK) {
      throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
    }
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace

Dims NiftiHeader::dims() const noexcept {
  return {static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]),
          static_cast<std::size_t>(dim[3])};
}

Spacing NiftiHeader::spacing() const noexcept {
  return {pixdim[1], pixdim[2], pixdim[3]};
}

std::array<std::uint8_t, kHeaderSize> byteswap_header(
    std::span<const std::uint8_t, kHeaderSize> bytes) {
  std::array<std::uint8_t, kHeaderSize> out;
  std::copy(bytes.begin(), bytes.end(), out.begin());
  for (const auto& run : kSwapRuns) {
    for (std::size_t n = 0; n < run.count; ++n) {
      auto* p = out.data() + run.offset + n * run.width;
      std::reverse(p, p + run.width);
    }
  }
  return out;
}

NiftiHeader parse_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw Error(ErrorKind::CorruptHeader, "need 348 header bytes, got " +
                                              std::to_string(bytes.size()));
  }
  std::array<std::uint8_t, kHeaderSize> raw;
  std::memcpy(raw.data(), bytes.data(), kHeaderSize);

  const auto as_le = load_le<std::int16_t>(raw.data() + kOffDim);
  const auto as_be = byteswap_value(as_le);
  NiftiHeader h;
  if (as_le >= 1 && as_le <= 7) {
    h.endianness = Endianness::Little;
  } else if (as_be >= 1 && as_be <= 7) {
    h.endianness = Endianness::Big;
    raw = byteswap_header(raw);
  } else {
    throw Error(ErrorKind::CorruptHeader,
                "dim[0] is outside [1, 7] in both byte orders");
  }
  h.raw = raw;

  const auto* p = raw.data();
  h.sizeof_hdr = load_le<std::int32_t>(p + kOffSizeofHdr);
  if (h.sizeof_hdr != static_cast<std::int32_t>(kHeaderSize)) {
    throw Error(ErrorKind::CorruptHeader,
                "sizeof_hdr is " + std::to_string(h.sizeof_hdr) + ", expected 348");
  }
  for (std::size_t i = 0; i < 8; ++i) {
    h.dim[i] = load_le<std::int16_t>(p + kOffDim + 2 * i);
    h.pixdim[i] = load_le<float>(p + kOffPixdim + 4 * i);
  }
  h.datatype = load_le<std::int16_t>(p + kOffDatatype);
  h.bitpix = load_le<std::int16_t>(p + kOffBitpix);
  h.vox_offset = load_le<float>(p + kOffVoxOffset);
  h.scl_slope = load_le<float>(p + kOffSclSlope);
  h.scl_inter = load_le<float>(p + kOffSclInter);
  std::memcpy(h.magic.data(), p + kOffMagic, 4);

  if (std::memcmp(h.magic.data(), "n+1\0", 4) != 0) {
    throw Error(ErrorKind::Format, "magic is not \"n+1\" (only single-file NIfTI-1 is supported)");
  }
  return h;
}

std::array<std::uint8_t, kHeaderSize> encode_header(const NiftiHeader& h) {
  std::array<std::uint8_t, kHeaderSize> raw = h.raw;
  auto* p = raw.data();
  store_le<std::int32_t>(p + kOffSizeofHdr, h.sizeof_hdr);
  for (std::size_t i = 0; i < 8; ++i) {
    store_le<std::int16_t>(p + kOffDim + 2 * i, h.dim[i]);
    store_le<float>(p + kOffPixdim + 4 * i, h.pixdim[i]);
  }
  store_le<std::int16_t>(p + kOffDatatype, h.datatype);
  store_le<std::int16_t>(p + kOffBitpix, h.bitpix);
  store_le<float>(p + kOffVoxOffset, h.vox_offset);
  store_le<float>(p + kOffSclSlope, h.scl_slope);
  store_le<float>(p + kOffSclInter, h.scl_inter);
  std::memcpy(p + kOffMagic, h.magic.data(), 4);
  return raw;
}

std::pair<Volume3D, NiftiHeader> read_volume(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const auto where = "'" + path.string() + "': ";
  NiftiHeader h;
  try {
    h = parse_header(std::as_bytes(std::span(bytes)));
  } catch (const Error& e) {
    throw Error(e.kind(), where + e.detail());
  }

  const bool singleton_time = h.dim[0] == 4 && h.dim[4] == 1;
  if (h.dim[0] != 3 && !singleton_time) {
    throw Error(ErrorKind::Format, where + "expected a 3D volume, dim[0] = " +
                                       std::to_string(h.dim[0]));
  }
  for (std::size_t i = 1; i <= 3; ++i) {
    if (h.dim[i] < 1) {
      throw Error(ErrorKind::CorruptHeader, where + "dim[" + std::to_string(i) + "] = " +
                                                std::to_string(h.dim[i]));
    }
  }
  std::size_t width = 0;
  try {
    width = element_size(h.datatype);
  } catch (const Error& e) {
    throw Error(e.kind(), where + e.detail());
  }
  if (static_cast<std::size_t>(h.bitpix) != 8 * width) {
    throw Error(ErrorKind::CorruptHeader, where + "bitpix " + std::to_string(h.bitpix) +
                                              " does not match datatype " +
                                              std::to_string(h.datatype));
  }
  if (!(h.vox_offset >= static_cast<float>(kHeaderSize))) {
    throw Error(ErrorKind::CorruptHeader, where + "vox_offset below 348");
  }

  const Dims dims = h.dims();
  const auto offset = static_cast<std::size_t>(h.vox_offset);
  const std::size_t count = dims.count();
  if (offset > bytes.size() || (bytes.size() - offset) / width < count) {
    throw Error(ErrorKind::CorruptFile, where + "voxel payload is truncated");
  }

  const bool swap = (h.endianness == Endianness::Big) != (std::endian::native == std::endian::big);
  const auto* src = bytes.data() + offset;
  std::vector<double> values(count);
  switch (h.datatype) {
    case kUint8: decode_elements<std::uint8_t>(src, count, swap, values); break;
    case kInt16: decode_elements<std::int16_t>(src, count, swap, values); break;
    case kInt32: decode_elements<std::int32_t>(src, count, swap, values); break;
    case kFloat32: decode_elements<float>(src, count, swap, values); break;
    case kFloat64: decode_elements<double>(src, count, swap, values); break;
    default: break;
  }
  const double slope = h.scl_slope;
  const double inter = h.scl_inter;
  if (slope != 0.0 && std::isfinite(slope) && std::isfinite(inter)) {
    for (double& v : values) v = slope * v + inter;
  }

  Spacing spacing = h.spacing();
  for (std::size_t axis = 0; axis < 3; ++axis) {
    // Some writers leave pixdim unset; fall back to unit spacing.
    const double s = spacing[axis];
    if (!(s > 0.0) || !std::isfinite(s)) {
      if (axis == 0) spacing.sx = 1.0;
      if (axis == 1) spacing.sy = 1.0;
      if (axis == 2) spacing.sz = 1.0;
    }
  }
  try {
    return {Volume3D(dims, spacing, std::move(values)), h};
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptFile, where + e.detail());
  }
}

void write_volume(const Volume3D& vol, const std::filesystem::path& path,
                  OutputDatatype datatype, const NiftiHeader* like, int gzip_level) {
  const Dims dims = vol.dims();
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (dims[axis] > 32767) {
      throw Error(ErrorKind::InvalidInput, "extent exceeds the NIfTI-1 limit of 32767");
    }
  }

  NiftiHeader h;
  if (like) {
    h = *like;
  } else {
    h.raw.fill(0);
    h.pixdim[0] = 1.0f;
    h.raw[kOffXyztUnits] = 2 | 8;  // millimetres, seconds
  }
  h.sizeof_hdr = static_cast<std::int32_t>(kHeaderSize);
  h.dim = {3, static_cast<std::int16_t>(dims.nx), static_cast<std::int16_t>(dims.ny),
           static_cast<std::int16_t>(dims.nz), 1, 1, 1, 1};
  const bool f64 = datatype == OutputDatatype::Float64;
  h.datatype = f64 ? kFloat64 : kFloat32;
  h.bitpix = f64 ? 64 : 32;
  if (h.pixdim[0] != 1.0f && h.pixdim[0] != -1.0f) h.pixdim[0] = 1.0f;
  h.pixdim[1] = static_cast<float>(vol.spacing().sx);
  h.pixdim[2] = static_cast<float>(vol.spacing().sy);
  h.pixdim[3] = static_cast<float>(vol.spacing().sz);
  for (std::size_t i = 4; i < 8; ++i) h.pixdim[i] = like ? h.pixdim[i] : 0.0f;
  h.vox_offset = static_cast<float>(kDataOffset);
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.magic = {'n', '+', '1', '\0'};
  h.endianness = Endianness::Little;

  const std::size_t width = f64 ? 8 : 4;
  std::vector<std::uint8_t> bytes(kDataOffset + vol.size() * width, 0);
  const auto header = encode_header(h);
  std::copy(header.begin(), header.end(), bytes.begin());
  auto* dst = bytes.data() + kDataOffset;
  const auto values = vol.data();
  if (f64) {
    for (std::size_t n = 0; n < values.size(); ++n) store_le<double>(dst + 8 * n, values[n]);
  } else {
    for (std::size_t n = 0; n < values.size(); ++n) {
      store_le<float>(dst + 4 * n, static_cast<float>(values[n]));
    }
  }
  write_file(path, bytes, gzip_level);
}

}  // namespace lesionforge::nifti
