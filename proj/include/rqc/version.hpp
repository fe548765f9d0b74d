#pragma once
// Library version string embedded into every CLI artifact for provenance.

namespace rqc {

inline constexpr const char* kVersionString = "1.0.0";

}  // namespace rqc
