// Copyright 2026 The Mentum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Wire protocol between a sensor board and the host.
//
// Every sample travels as a fixed 16-byte record:
//
//   offset  size  field
//   0       2     sync 0xAA 0x55
//   2       2     seq, little-endian, wraps at 65536
//   4       2     low 16 bits of t_ms, little-endian
//   6       6     ax, ay, az, signed little-endian milli-g
//   12      2     stretch, ADC counts 0..1023
//   14      1     flags, bit0 = button, other bits zero
//   15      1     CRC-8 (poly 0x07, init 0x00) over offsets 2..14
//
// The decoder unrolls the truncated timestamp from arrival order, so streams
// must deliver at least one frame per 65.5 s (nominal rate is 100 Hz).

#ifndef MENTUM_DEVICE_LINK_H_
#define MENTUM_DEVICE_LINK_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mentum {

inline constexpr std::size_t kWireFrameSize = 16;
inline constexpr std::uint8_t kSyncByte0 = 0xAA;
inline constexpr std::uint8_t kSyncByte1 = 0x55;
inline constexpr std::uint16_t kStretchMax = 1023;

inline constexpr double kMinStreamRateHz = 10.0;
inline constexpr double kMaxStreamRateHz = 1000.0;
inline constexpr double kDefaultStreamRateHz = 100.0;

struct SensorFrame {
  std::uint16_t seq = 0;
  std::uint64_t t_ms = 0;
  std::int16_t ax = 0;
  std::int16_t ay = 0;
  std::int16_t az = 0;
  std::uint16_t stretch = 0;
  bool button = false;

  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

using WireFrame = std::array<std::uint8_t, kWireFrameSize>;

// CRC-8/ATM: polynomial 0x07, init 0x00, no reflection, no final xor.
std::uint8_t crc8(std::span<const std::uint8_t> bytes);

// Throws EncodingError when stretch exceeds kStretchMax.
WireFrame encode_frame(const SensorFrame& frame);
void append_encoded(const SensorFrame& frame, std::vector<std::uint8_t>& out);

struct DecoderStats {
  std::uint64_t frames = 0;
  // CRC mismatch on a candidate found where a frame was expected.
  std::uint64_t crc_failures = 0;
  // CRC-valid record with out-of-range fields, where a frame was expected.
  std::uint64_t malformed = 0;
  // Expected a frame boundary but the sync pair was absent.
  std::uint64_t sync_losses = 0;
  // Sync pair found between expected boundaries that failed validation.
  std::uint64_t false_syncs = 0;
  // Lock re-acquired after hunting through corrupt or foreign bytes.
  std::uint64_t resyncs = 0;
  std::uint64_t bytes_discarded = 0;
  // Accepted frames whose seq did not follow the previous one.
  std::uint64_t seq_gaps = 0;

  // One count per corrupted frame under a byte-substitution fault model.
  std::uint64_t faults() const { return crc_failures + malformed + sync_losses; }
};

// Incremental stream decoder. A plain value: copy it to checkpoint, move it
// to hand the stream to another thread. Never throws on corrupt input.
class StreamDecoder {
 public:
  std::vector<SensorFrame> decode(std::span<const std::uint8_t> bytes);
  void decode(std::span<const std::uint8_t> bytes, std::vector<SensorFrame>& out);

  const DecoderStats& stats() const { return stats_; }
  std::size_t pending_bytes() const { return buffer_.size() - head_; }

 private:
  bool at_expected_boundary(std::uint64_t position) const;
  SensorFrame unpack(const std::uint8_t* record);

  std::vector<std::uint8_t> buffer_;
  std::size_t head_ = 0;
  std::uint64_t buffer_offset_ = 0;  // absolute stream position of buffer_[0]
  std::uint64_t anchor_ = 0;         // start of the last accepted frame
  bool hunting_ = false;
  std::optional<std::uint16_t> last_seq_;
  std::uint64_t last_t_ms_ = 0;
  bool have_time_ = false;
  DecoderStats stats_;
};

// Free-function form: decode `bytes` continuing from `state`.
std::vector<SensorFrame> decode_stream(std::span<const std::uint8_t> bytes, StreamDecoder& state);

// Pull-style byte source feeding a decoder.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Fills up to buffer.size() bytes; returns 0 at end of stream.
  virtual std::size_t read(std::span<std::uint8_t> buffer) = 0;
};

class MemoryByteSource final : public ByteSource {
 public:
  explicit MemoryByteSource(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}
  std::size_t read(std::span<std::uint8_t> buffer) override;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t cursor_ = 0;
};

class FileByteSource final : public ByteSource {
 public:
  explicit FileByteSource(const std::string& path);
  ~FileByteSource() override;
  FileByteSource(const FileByteSource&) = delete;
  FileByteSource& operator=(const FileByteSource&) = delete;
  std::size_t read(std::span<std::uint8_t> buffer) override;

 private:
  std::FILE* file_ = nullptr;
};

// True when the build includes the POSIX serial adapter.
bool serial_supported();

// Opens a tty in raw 8N1 mode. Throws IoError when unsupported or on failure.
std::unique_ptr<ByteSource> open_serial_port(const std::string& device, int baud);

std::vector<std::uint8_t> read_all(ByteSource& source);

}  // namespace mentum

#endif  // MENTUM_DEVICE_LINK_H_
