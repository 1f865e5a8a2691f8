#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace eofcast::detail {

// Artifact numbers are fixed at 9 significant digits so repeated runs are
// byte-comparable. %.17g is used instead where round-tripping must be exact.
inline std::string fmt_g9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string fmt_exact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Rounds through the 9-digit decimal representation, for doubles that land in
// JSON documents (nlohmann prints shortest-round-trip, so pre-rounding keeps
// the emitted text at 9 significant digits too).
inline double round9(double v)
{
    return std::strtod(fmt_g9(v).c_str(), nullptr);
}

} // namespace eofcast::detail
