#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dvsnoise/events.hpp"

namespace dvsnoise {

inline constexpr std::array<char, 4> kEventFileMagic = {'D', 'V', 'S', 'E'};
inline constexpr uint32_t kEventFileVersion = 1;

/// Event file header: magic, version, sensor dimensions, record count.
struct EventFileHeader {
  uint32_t version = kEventFileVersion;
  uint32_t width = 0;
  uint32_t height = 0;
  uint64_t event_count = 0;
};

class IoError : public std::runtime_error {
 public:
  enum class Kind { open_failed, bad_magic, bad_version, truncated, bad_data, write_failed };

  IoError(Kind kind, const std::string& path, const std::string& msg)
      : std::runtime_error(path + ": " + msg), kind_(kind), path_(path) {}

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

namespace detail {

// Explicit little-endian packing keeps the on-disk format independent of
// host byte order.
inline void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}
inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline uint16_t get_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
inline uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
inline uint64_t get_u64(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace detail

inline constexpr size_t kEventRecordBytes = 13;
inline constexpr size_t kEventHeaderBytes = 24;

/// Serializes one event into the fixed 13-byte little-endian record:
/// t_us u64, x u16, y u16, polarity u8 (1 = ON, 0 = OFF).
inline std::array<unsigned char, kEventRecordBytes> encode_event(const DvsEvent& e) {
  std::array<unsigned char, kEventRecordBytes> out{};
  for (int i = 0; i < 8; ++i)
    out[i] = static_cast<unsigned char>((e.t_us >> (8 * i)) & 0xFF);
  out[8] = static_cast<unsigned char>(e.x & 0xFF);
  out[9] = static_cast<unsigned char>(e.x >> 8);
  out[10] = static_cast<unsigned char>(e.y & 0xFF);
  out[11] = static_cast<unsigned char>(e.y >> 8);
  out[12] = e.polarity == Polarity::on ? 1 : 0;
  return out;
}

/*
 * Writes header + records. Events must be timestamp-sorted and lie
 * within the header dimensions.
 */
inline void write_events_binary(const std::vector<DvsEvent>& events,
                                const EventFileHeader& header,
                                const std::string& path) {
  if (!is_timestamp_sorted(events))
    throw std::invalid_argument("write_events_binary: events not sorted");
  for (const DvsEvent& e : events)
    if (e.x >= header.width || e.y >= header.height)
      throw std::invalid_argument(
          "write_events_binary: event coordinates outside header dimensions");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::open_failed, path, "cannot open for writing");

  std::string buf;
  buf.reserve(kEventHeaderBytes + events.size() * kEventRecordBytes);
  buf.append(kEventFileMagic.data(), kEventFileMagic.size());
  detail::put_u32(buf, header.version);
  detail::put_u32(buf, header.width);
  detail::put_u32(buf, header.height);
  detail::put_u64(buf, static_cast<uint64_t>(events.size()));
  for (const DvsEvent& e : events) {
    detail::put_u64(buf, e.t_us);
    detail::put_u16(buf, e.x);
    detail::put_u16(buf, e.y);
    buf.push_back(static_cast<char>(e.polarity == Polarity::on ? 1 : 0));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out.flush()) throw IoError(IoError::Kind::write_failed, path, "write failed");
}

/// Convenience overload deriving the header from array dimensions.
inline void write_events_binary(const std::vector<DvsEvent>& events,
                                uint32_t width, uint32_t height,
                                const std::string& path) {
  EventFileHeader header;
  header.width = width;
  header.height = height;
  header.event_count = events.size();
  write_events_binary(events, header, path);
}

inline std::pair<EventFileHeader, std::vector<DvsEvent>> read_events_binary(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::open_failed, path, "cannot open for reading");
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(raw.data());

  if (raw.size() < 4 ||
      !std::equal(kEventFileMagic.begin(), kEventFileMagic.end(), raw.begin()))
    throw IoError(IoError::Kind::bad_magic, path, "bad magic bytes");
  if (raw.size() < kEventHeaderBytes)
    throw IoError(IoError::Kind::truncated, path, "truncated header");

  EventFileHeader header;
  header.version = detail::get_u32(data + 4);
  if (header.version != kEventFileVersion)
    throw IoError(IoError::Kind::bad_version, path,
                  "unsupported format version " + std::to_string(header.version));
  header.width = detail::get_u32(data + 8);
  header.height = detail::get_u32(data + 12);
  header.event_count = detail::get_u64(data + 16);

  const size_t payload = raw.size() - kEventHeaderBytes;
  if (payload != header.event_count * kEventRecordBytes)
    throw IoError(IoError::Kind::truncated, path,
                  "payload size does not match header event count");

  std::vector<DvsEvent> events;
  events.reserve(header.event_count);
  const unsigned char* p = data + kEventHeaderBytes;
  for (uint64_t i = 0; i < header.event_count; ++i, p += kEventRecordBytes) {
    DvsEvent e;
    e.t_us = detail::get_u64(p);
    e.x = detail::get_u16(p + 8);
    e.y = detail::get_u16(p + 10);
    const unsigned char pol = p[12];
    if (pol > 1)
      throw IoError(IoError::Kind::bad_data, path,
                    "record " + std::to_string(i) + ": bad polarity byte");
    e.polarity = pol ? Polarity::on : Polarity::off;
    events.push_back(e);
  }
  return {header, events};
}

inline constexpr std::string_view kEventCsvHeader = "t_us,x,y,polarity";

inline void write_events_csv(const std::vector<DvsEvent>& events,
                             const std::string& path) {
  if (!is_timestamp_sorted(events))
    throw std::invalid_argument("write_events_csv: events not sorted");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(IoError::Kind::open_failed, path, "cannot open for writing");
  out << kEventCsvHeader << '\n';
  for (const DvsEvent& e : events)
    out << e.t_us << ',' << e.x << ',' << e.y << ','
        << polarity_digit(e.polarity) << '\n';
  if (!out.flush()) throw IoError(IoError::Kind::write_failed, path, "write failed");
}

namespace detail {

template <typename T>
T parse_uint_field(std::string_view field, const std::string& path, size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw IoError(IoError::Kind::bad_data, path,
                  "line " + std::to_string(line_no) + ": bad field '" +
                      std::string(field) + "'");
  return value;
}

}  // namespace detail

inline std::vector<DvsEvent> read_events_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::open_failed, path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line) || line != kEventCsvHeader)
    throw IoError(IoError::Kind::bad_data, path, "bad CSV header");
  std::vector<DvsEvent> events;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string_view, 4> fields;
    std::string_view rest = line;
    for (int i = 0; i < 4; ++i) {
      const size_t comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos))
        throw IoError(IoError::Kind::bad_data, path,
                      "line " + std::to_string(line_no) + ": expected 4 fields");
      fields[i] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    DvsEvent e;
    e.t_us = detail::parse_uint_field<uint64_t>(fields[0], path, line_no);
    e.x = detail::parse_uint_field<uint16_t>(fields[1], path, line_no);
    e.y = detail::parse_uint_field<uint16_t>(fields[2], path, line_no);
    if (fields[3] == "1") e.polarity = Polarity::on;
    else if (fields[3] == "0") e.polarity = Polarity::off;
    else
      throw IoError(IoError::Kind::bad_data, path,
                    "line " + std::to_string(line_no) + ": bad polarity '" +
                        std::string(fields[3]) + "'");
    events.push_back(e);
  }
  return events;
}

/// True when the file starts with the binary event magic.
inline bool is_binary_event_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoError::Kind::open_failed, path, "cannot open for reading");
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  return in.gcount() == 4 &&
         std::equal(kEventFileMagic.begin(), kEventFileMagic.end(), head.begin());
}

}  // namespace dvsnoise
