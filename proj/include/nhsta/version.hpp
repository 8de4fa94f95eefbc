#pragma once

#ifndef NHSTA_VERSION
#define NHSTA_VERSION "0.1.0"
#endif

namespace nhsta {

inline constexpr const char* kVersion = NHSTA_VERSION;

}  // namespace nhsta
