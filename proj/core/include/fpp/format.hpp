#pragma once

#include <string>

namespace fpp {

// Shortest exact decimal form of a double ("%.17g"); used everywhere output
// bytes must be reproducible.
std::string fmt_g17(double v);

}  // namespace fpp
