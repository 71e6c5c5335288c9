#pragma once

#ifndef LOEWNER_LAB_BUILD
#define LOEWNER_LAB_BUILD "unknown"
#endif

namespace loewner_lab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBuild = LOEWNER_LAB_BUILD;  // git describe at configure time

}  // namespace loewner_lab
