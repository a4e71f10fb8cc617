#pragma once

#include <iomanip>
#include <sstream>
#include <string>

namespace szego {

/// Table and report form of a double: 17 significant digits.
inline std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace szego
