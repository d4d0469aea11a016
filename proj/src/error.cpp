#include "tcal/error.hpp"

namespace tcal {

ParseError::ParseError(const std::string &what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

UnsortedStreamError::UnsortedStreamError(const std::string &stream,
                                         std::size_t index)
    : Error(stream + " stream is not sorted by time at index " +
            std::to_string(index)),
      stream_(stream), index_(index) {}

} // namespace tcal
