#ifndef CAVTUN_VERSION_HPP
#define CAVTUN_VERSION_HPP

namespace cavtun {

inline constexpr const char* version = "0.1.0";

// Bumped whenever a CSV column set changes; emitted in every output header.
inline constexpr const char* series_schema = "series/v1";
inline constexpr const char* spectrum_schema = "spectrum/v1";

} // namespace cavtun

#endif
