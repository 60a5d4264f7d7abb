#ifndef SPDTEST_VERSION_HPP
#define SPDTEST_VERSION_HPP

namespace spdtest {

inline constexpr const char* kVersion = "0.1.0";

}

#endif  // SPDTEST_VERSION_HPP
