#pragma once

#include <algorithm>
#include <array>
#include <cerrno>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ipstat/error.hpp"
#include "ipstat/ip_address.hpp"

namespace ipstat {

enum class RecordFormat { text, binary };

inline const char* to_string(RecordFormat format) {
  return format == RecordFormat::text ? "text" : "binary";
}

inline RecordFormat parse_format(std::string_view name) {
  if (name == "text") return RecordFormat::text;
  if (name == "binary") return RecordFormat::binary;
  throw Error(ErrorCode::InvalidArgument, "unknown record format '" + std::string(name) + "'");
}

/// Binary record files: "IPR1", u32le record count, then u32le address words.
inline constexpr std::array<char, 4> kBinaryMagic = {'I', 'P', 'R', '1'};
inline constexpr std::size_t kBinaryHeaderBytes = 8;

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "': " + std::strerror(errno));
  }
  return f;
}

inline std::uint32_t load_le32(const unsigned char* p) noexcept {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

inline void store_le32(unsigned char* p, std::uint32_t v) noexcept {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

}  // namespace detail

/// Returns binary when the file starts with the binary magic, text otherwise.
inline RecordFormat detect_format(const std::filesystem::path& path) {
  auto f = detail::open_file(path, "rb");
  std::array<char, 4> head{};
  if (std::fread(head.data(), 1, head.size(), f.get()) == head.size() && head == kBinaryMagic) {
    return RecordFormat::binary;
  }
  return RecordFormat::text;
}

/// Single-consumer reader over a record file. In strict mode the first
/// malformed entry throws with its line number; in lenient mode malformed
/// lines are counted in skipped() and passed over.
class RecordStream {
 public:
  RecordStream(const std::filesystem::path& path, RecordFormat format, bool lenient = false)
      : file_(detail::open_file(path, "rb")), path_(path), format_(format), lenient_(lenient) {
    if (format_ == RecordFormat::binary) read_binary_header();
    buffer_.resize(kChunkBytes);
  }

  std::optional<IpV4Address> next() {
    return format_ == RecordFormat::text ? next_text() : next_binary();
  }

  template <class F>
  void for_each(F&& fn) {
    while (auto addr = next()) fn(*addr);
  }

  std::uint64_t records_read() const noexcept { return records_read_; }
  std::uint64_t skipped() const noexcept { return skipped_; }
  RecordFormat format() const noexcept { return format_; }
  const std::filesystem::path& path() const noexcept { return path_; }
  /// Count from the binary header; nullopt for text files.
  std::optional<std::uint64_t> declared_records() const noexcept { return declared_; }

 private:
  static constexpr std::size_t kChunkBytes = 1 << 20;

  void read_binary_header() {
    unsigned char header[kBinaryHeaderBytes];
    if (std::fread(header, 1, sizeof header, file_.get()) != sizeof header ||
        std::memcmp(header, kBinaryMagic.data(), kBinaryMagic.size()) != 0) {
      throw Error(ErrorCode::IoError, "'" + path_.string() + "' is not a binary record file");
    }
    declared_ = detail::load_le32(header + 4);
  }

  // Refills buffer_ keeping the unconsumed tail [begin_, end_). Returns false at EOF.
  bool refill() {
    if (eof_) return false;
    if (begin_ > 0) {
      std::memmove(buffer_.data(), buffer_.data() + begin_, end_ - begin_);
      end_ -= begin_;
      begin_ = 0;
    }
    if (end_ == buffer_.size()) buffer_.resize(buffer_.size() * 2);
    const std::size_t got = std::fread(buffer_.data() + end_, 1, buffer_.size() - end_, file_.get());
    if (got == 0) {
      if (std::ferror(file_.get())) {
        throw Error(ErrorCode::IoError, "read failed on '" + path_.string() + "'");
      }
      eof_ = true;
      return false;
    }
    end_ += got;
    return true;
  }

  std::optional<IpV4Address> next_text() {
    for (;;) {
      std::string_view line;
      const char* base = buffer_.data();
      const void* nl = std::memchr(base + begin_, '\n', end_ - begin_);
      if (nl) {
        const std::size_t stop = static_cast<const char*>(nl) - base;
        line = std::string_view(base + begin_, stop - begin_);
        begin_ = stop + 1;
      } else if (refill()) {
        continue;
      } else if (begin_ < end_) {
        line = std::string_view(buffer_.data() + begin_, end_ - begin_);
        begin_ = end_;
      } else {
        return std::nullopt;
      }
      ++line_no_;
      if (std::all_of(line.begin(), line.end(), detail::is_space)) continue;
      try {
        const IpV4Address addr = parse_dotted(line);
        ++records_read_;
        return addr;
      } catch (const Error& e) {
        if (!lenient_) throw Error(e.code(), e.message(), line_no_);
        ++skipped_;
      }
    }
  }

  std::optional<IpV4Address> next_binary() {
    if (records_read_ == *declared_) {
      if (!trailing_checked_) {
        trailing_checked_ = true;
        if (begin_ < end_ || refill()) {
          throw Error(ErrorCode::IoError,
                      "'" + path_.string() + "' has bytes after its declared records");
        }
      }
      return std::nullopt;
    }
    while (end_ - begin_ < 4) {
      if (!refill()) {
        throw Error(ErrorCode::IoError,
                    "'" + path_.string() + "' is truncated: header declares " +
                        std::to_string(*declared_) + " records, found " +
                        std::to_string(records_read_),
                    records_read_ + 1);
      }
    }
    const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + begin_);
    begin_ += 4;
    ++records_read_;
    return from_u32(detail::load_le32(p));
  }

  detail::FilePtr file_;
  std::filesystem::path path_;
  RecordFormat format_;
  bool lenient_;
  std::vector<char> buffer_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  bool eof_ = false;
  bool trailing_checked_ = false;
  std::uint64_t line_no_ = 0;
  std::uint64_t records_read_ = 0;
  std::uint64_t skipped_ = 0;
  std::optional<std::uint64_t> declared_;
};

/// Buffered writer for either record format. The binary header count is
/// patched in on close(); call close() to observe write errors.
class RecordWriter {
 public:
  RecordWriter(const std::filesystem::path& path, RecordFormat format)
      : file_(detail::open_file(path, "wb")), path_(path), format_(format) {
    buffer_.reserve(kFlushBytes + 32);
    if (format_ == RecordFormat::binary) {
      buffer_.insert(buffer_.end(), kBinaryMagic.begin(), kBinaryMagic.end());
      buffer_.insert(buffer_.end(), 4, '\0');
    }
  }

  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;

  ~RecordWriter() {
    try {
      close();
    } catch (...) {
    }
  }

  void write(IpV4Address addr) {
    if (format_ == RecordFormat::text) {
      char line[16];
      char* end = format_to(line, addr);
      *end++ = '\n';
      buffer_.insert(buffer_.end(), line, end);
    } else {
      if (written_ == UINT32_MAX) {
        throw Error(ErrorCode::IoError, "binary record files hold at most 2^32-1 records");
      }
      unsigned char word[4];
      detail::store_le32(word, to_u32(addr));
      buffer_.insert(buffer_.end(), word, word + 4);
    }
    ++written_;
    if (buffer_.size() >= kFlushBytes) flush();
  }

  std::uint64_t written() const noexcept { return written_; }

  void close() {
    if (!file_) return;
    flush();
    if (format_ == RecordFormat::binary) {
      unsigned char count[4];
      detail::store_le32(count, static_cast<std::uint32_t>(written_));
      if (std::fseek(file_.get(), 4, SEEK_SET) != 0 ||
          std::fwrite(count, 1, 4, file_.get()) != 4) {
        file_.reset();
        throw Error(ErrorCode::IoError, "cannot write header of '" + path_.string() + "'");
      }
    }
    std::FILE* raw = file_.release();
    if (std::fclose(raw) != 0) {
      throw Error(ErrorCode::IoError, "cannot close '" + path_.string() + "'");
    }
  }

 private:
  static constexpr std::size_t kFlushBytes = 1 << 20;

  void flush() {
    if (buffer_.empty()) return;
    if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_.get()) != buffer_.size()) {
      throw Error(ErrorCode::IoError, "write failed on '" + path_.string() + "'");
    }
    buffer_.clear();
  }

  detail::FilePtr file_;
  std::filesystem::path path_;
  RecordFormat format_;
  std::vector<char> buffer_;
  std::uint64_t written_ = 0;
};

inline void write_records(const std::filesystem::path& path, RecordFormat format,
                          std::span<const IpV4Address> records) {
  RecordWriter writer(path, format);
  for (const auto& addr : records) writer.write(addr);
  writer.close();
}

inline std::vector<IpV4Address> read_records(const std::filesystem::path& path,
                                             RecordFormat format, bool lenient = false) {
  RecordStream stream(path, format, lenient);
  std::vector<IpV4Address> out;
  if (auto n = stream.declared_records()) out.reserve(*n);
  stream.for_each([&](IpV4Address a) { out.push_back(a); });
  return out;
}

// ---------------------------------------------------------------------------
// Record sources: anything the counters can iterate, possibly several times.

/// A source yields addresses through for_each(). Replayable sources may be
/// iterated any number of times and produce the same sequence each time.
template <class S>
concept RecordSource = requires(S& source, const S& csource) {
  source.for_each([](IpV4Address) {});
  { csource.replayable() } -> std::convertible_to<bool>;
  { csource.passes() } -> std::convertible_to<std::uint64_t>;
};

/// Replays a record file by reopening it for every pass.
class FileSource {
 public:
  FileSource(std::filesystem::path path, RecordFormat format, bool lenient = false)
      : path_(std::move(path)), format_(format), lenient_(lenient) {}

  explicit FileSource(std::filesystem::path path)
      : FileSource(path, detect_format(path), false) {}

  template <class F>
  void for_each(F&& fn) {
    RecordStream stream(path_, format_, lenient_);
    stream.for_each(fn);
    last_records_ = stream.records_read();
    last_skipped_ = stream.skipped();
    ++passes_;
  }

  bool replayable() const noexcept { return true; }
  std::uint64_t passes() const noexcept { return passes_; }
  std::uint64_t last_records() const noexcept { return last_records_; }
  std::uint64_t last_skipped() const noexcept { return last_skipped_; }
  const std::filesystem::path& path() const noexcept { return path_; }
  RecordFormat format() const noexcept { return format_; }

 private:
  std::filesystem::path path_;
  RecordFormat format_;
  bool lenient_;
  std::uint64_t passes_ = 0;
  std::uint64_t last_records_ = 0;
  std::uint64_t last_skipped_ = 0;
};

/// Non-owning view over addresses already in memory.
class MemorySource {
 public:
  explicit MemorySource(std::span<const IpV4Address> records) : records_(records) {}

  template <class F>
  void for_each(F&& fn) {
    for (const auto& addr : records_) fn(addr);
    ++passes_;
  }

  bool replayable() const noexcept { return true; }
  std::uint64_t passes() const noexcept { return passes_; }
  std::span<const IpV4Address> records() const noexcept { return records_; }

 private:
  std::span<const IpV4Address> records_;
  std::uint64_t passes_ = 0;
};

/// Wraps an open stream; it can be consumed exactly once.
class OneShotSource {
 public:
  explicit OneShotSource(RecordStream stream) : stream_(std::move(stream)) {}

  template <class F>
  void for_each(F&& fn) {
    if (passes_ > 0) throw Error(ErrorCode::SourceNotReplayable, "stream already consumed");
    ++passes_;
    stream_.for_each(fn);
  }

  bool replayable() const noexcept { return false; }
  std::uint64_t passes() const noexcept { return passes_; }

 private:
  RecordStream stream_;
  std::uint64_t passes_ = 0;
};

static_assert(RecordSource<FileSource>);
static_assert(RecordSource<MemorySource>);
static_assert(RecordSource<OneShotSource>);

/// Distinct first octets present in one pass over `source`, ascending.
template <RecordSource S>
std::vector<std::uint8_t> first_octets_present(S& source) {
  std::array<bool, 256> seen{};
  source.for_each([&](IpV4Address addr) { seen[addr.a] = true; });
  std::vector<std::uint8_t> out;
  for (unsigned v = 0; v < 256; ++v) {
    if (seen[v]) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

}  // namespace ipstat
