#ifndef STARCLOAK_COMMON_HPP
#define STARCLOAK_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace starcloak {

using NodeIdx = std::uint32_t;    // internal node index
using EdgeIdx = std::uint32_t;    // internal edge index
using SegmentId = std::uint32_t;  // segment index, assigned at build time
using StarId = std::uint32_t;     // star index, assigned at build time
using QueryId = std::uint64_t;    // hash(user || issue time)
using UserId = std::uint64_t;

inline constexpr NodeIdx kInvalidNode = static_cast<NodeIdx>(-1);
inline constexpr SegmentId kInvalidSegment = static_cast<SegmentId>(-1);
inline constexpr StarId kInvalidStar = static_cast<StarId>(-1);

// Base error; subcommands map these to exit codes (2 config, 3 data).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what) {}
};

}  // namespace starcloak

#endif
