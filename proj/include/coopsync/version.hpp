#ifndef COOPSYNC_VERSION_HPP
#define COOPSYNC_VERSION_HPP

namespace coopsync {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace coopsync

#endif  // COOPSYNC_VERSION_HPP
