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

#include "mentum/device_link.h"

#include <algorithm>
#include <cstring>

#include "mentum/error.h"

#ifdef MENTUM_WITH_SERIAL
#include <fcntl.h>
#include <termios.h>
#include <unistd.h>
#endif

namespace mentum {

namespace {

constexpr std::size_t kCrcBegin = 2;
constexpr std::size_t kCrcEnd = 15;  // exclusive; byte 15 holds the CRC

void put_u16(std::uint8_t* out, std::uint16_t v) {
  out[0] = static_cast<std::uint8_t>(v & 0xFF);
  out[1] = static_cast<std::uint8_t>(v >> 8);
}

std::uint16_t get_u16(const std::uint8_t* in) {
  return static_cast<std::uint16_t>(in[0] | (in[1] << 8));
}

constexpr std::array<std::uint8_t, 256> make_crc_table() {
  std::array<std::uint8_t, 256> table{};
  for (int i = 0; i < 256; ++i) {
    std::uint8_t crc = static_cast<std::uint8_t>(i);
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x80) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07)
                         : static_cast<std::uint8_t>(crc << 1);
    }
    table[i] = crc;
  }
  return table;
}

constexpr auto kCrcTable = make_crc_table();

}  // namespace

std::uint8_t crc8(std::span<const std::uint8_t> bytes) {
  std::uint8_t crc = 0;
  for (std::uint8_t b : bytes) crc = kCrcTable[crc ^ b];
  return crc;
}

WireFrame encode_frame(const SensorFrame& frame) {
  if (frame.stretch > kStretchMax) {
    throw EncodingError("stretch " + std::to_string(frame.stretch) + " exceeds ADC range 0.." +
                        std::to_string(kStretchMax));
  }
  WireFrame out{};
  out[0] = kSyncByte0;
  out[1] = kSyncByte1;
  put_u16(&out[2], frame.seq);
  put_u16(&out[4], static_cast<std::uint16_t>(frame.t_ms & 0xFFFF));
  put_u16(&out[6], static_cast<std::uint16_t>(frame.ax));
  put_u16(&out[8], static_cast<std::uint16_t>(frame.ay));
  put_u16(&out[10], static_cast<std::uint16_t>(frame.az));
  put_u16(&out[12], frame.stretch);
  out[14] = frame.button ? 0x01 : 0x00;
  out[15] = crc8(std::span(out).subspan(kCrcBegin, kCrcEnd - kCrcBegin));
  return out;
}

void append_encoded(const SensorFrame& frame, std::vector<std::uint8_t>& out) {
  const WireFrame wire = encode_frame(frame);
  out.insert(out.end(), wire.begin(), wire.end());
}

bool StreamDecoder::at_expected_boundary(std::uint64_t position) const {
  return position >= anchor_ && (position - anchor_) % kWireFrameSize == 0;
}

SensorFrame StreamDecoder::unpack(const std::uint8_t* record) {
  SensorFrame f;
  f.seq = get_u16(record + 2);
  const std::uint16_t t_low = get_u16(record + 4);
  if (!have_time_) {
    f.t_ms = t_low;
    have_time_ = true;
  } else {
    const auto last_low = static_cast<std::uint16_t>(last_t_ms_ & 0xFFFF);
    f.t_ms = last_t_ms_ + static_cast<std::uint16_t>(t_low - last_low);
  }
  last_t_ms_ = f.t_ms;
  f.ax = static_cast<std::int16_t>(get_u16(record + 6));
  f.ay = static_cast<std::int16_t>(get_u16(record + 8));
  f.az = static_cast<std::int16_t>(get_u16(record + 10));
  f.stretch = get_u16(record + 12);
  f.button = (record[14] & 0x01) != 0;
  return f;
}

std::vector<SensorFrame> StreamDecoder::decode(std::span<const std::uint8_t> bytes) {
  std::vector<SensorFrame> out;
  out.reserve(bytes.size() / kWireFrameSize + 1);
  decode(bytes, out);
  return out;
}

void StreamDecoder::decode(std::span<const std::uint8_t> bytes, std::vector<SensorFrame>& out) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());

  while (head_ < buffer_.size()) {
    const std::size_t available = buffer_.size() - head_;
    const std::uint8_t* p = buffer_.data() + head_;
    const std::uint64_t position = buffer_offset_ + head_;
    const bool expected = at_expected_boundary(position);

    if (p[0] == kSyncByte0 && available < 2) break;
    const bool sync = p[0] == kSyncByte0 && p[1] == kSyncByte1;

    if (!sync) {
      if (expected) ++stats_.sync_losses;
      hunting_ = true;
      ++head_;
      ++stats_.bytes_discarded;
      continue;
    }
    if (available < kWireFrameSize) break;

    const bool crc_ok = crc8(std::span(p + kCrcBegin, kCrcEnd - kCrcBegin)) == p[kCrcEnd];
    const bool fields_ok = get_u16(p + 12) <= kStretchMax && (p[14] & 0xFE) == 0;
    if (crc_ok && fields_ok) {
      SensorFrame f = unpack(p);
      if (last_seq_ && f.seq != static_cast<std::uint16_t>(*last_seq_ + 1)) ++stats_.seq_gaps;
      last_seq_ = f.seq;
      out.push_back(f);
      ++stats_.frames;
      if (hunting_) ++stats_.resyncs;
      hunting_ = false;
      anchor_ = position;
      head_ += kWireFrameSize;
      continue;
    }

    if (!expected) {
      ++stats_.false_syncs;
    } else if (!crc_ok) {
      ++stats_.crc_failures;
    } else {
      ++stats_.malformed;
    }
    hunting_ = true;
    ++head_;
    ++stats_.bytes_discarded;
  }

  if (head_ > 0) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(head_));
    buffer_offset_ += head_;
    head_ = 0;
  }
}

std::vector<SensorFrame> decode_stream(std::span<const std::uint8_t> bytes, StreamDecoder& state) {
  return state.decode(bytes);
}

std::size_t MemoryByteSource::read(std::span<std::uint8_t> buffer) {
  const std::size_t n = std::min(buffer.size(), bytes_.size() - cursor_);
  std::memcpy(buffer.data(), bytes_.data() + cursor_, n);
  cursor_ += n;
  return n;
}

FileByteSource::FileByteSource(const std::string& path) : file_(std::fopen(path.c_str(), "rb")) {
  if (file_ == nullptr) throw IoError("cannot open byte stream " + path);
}

FileByteSource::~FileByteSource() {
  if (file_ != nullptr) std::fclose(file_);
}

std::size_t FileByteSource::read(std::span<std::uint8_t> buffer) {
  return std::fread(buffer.data(), 1, buffer.size(), file_);
}

std::vector<std::uint8_t> read_all(ByteSource& source) {
  std::vector<std::uint8_t> out;
  std::array<std::uint8_t, 4096> chunk{};
  while (const std::size_t n = source.read(chunk)) out.insert(out.end(), chunk.begin(), chunk.begin() + n);
  return out;
}

#ifdef MENTUM_WITH_SERIAL

namespace {

speed_t to_speed(int baud) {
  switch (baud) {
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    case 230400: return B230400;
    default: throw ConfigError("unsupported baud rate " + std::to_string(baud));
  }
}

class SerialByteSource final : public ByteSource {
 public:
  SerialByteSource(const std::string& device, int baud) {
    fd_ = ::open(device.c_str(), O_RDONLY | O_NOCTTY);
    if (fd_ < 0) throw IoError("cannot open serial device " + device);
    termios tio{};
    if (::tcgetattr(fd_, &tio) != 0) {
      ::close(fd_);
      throw IoError("tcgetattr failed on " + device);
    }
    ::cfmakeraw(&tio);
    tio.c_cflag |= CLOCAL | CREAD;
    tio.c_cc[VMIN] = 1;
    tio.c_cc[VTIME] = 0;
    ::cfsetispeed(&tio, to_speed(baud));
    ::cfsetospeed(&tio, to_speed(baud));
    if (::tcsetattr(fd_, TCSANOW, &tio) != 0) {
      ::close(fd_);
      throw IoError("tcsetattr failed on " + device);
    }
  }
  ~SerialByteSource() override { ::close(fd_); }
  SerialByteSource(const SerialByteSource&) = delete;
  SerialByteSource& operator=(const SerialByteSource&) = delete;

  std::size_t read(std::span<std::uint8_t> buffer) override {
    const ssize_t n = ::read(fd_, buffer.data(), buffer.size());
    return n > 0 ? static_cast<std::size_t>(n) : 0;
  }

 private:
  int fd_ = -1;
};

}  // namespace

bool serial_supported() { return true; }

std::unique_ptr<ByteSource> open_serial_port(const std::string& device, int baud) {
  return std::make_unique<SerialByteSource>(device, baud);
}

#else

bool serial_supported() { return false; }

std::unique_ptr<ByteSource> open_serial_port(const std::string& device, int) {
  throw IoError("serial support not built; reconfigure with -DMENTUM_WITH_SERIAL=ON (" + device + ")");
}

#endif

}  // namespace mentum
