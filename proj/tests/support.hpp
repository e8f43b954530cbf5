#pragma once

#include <doctest.h>

#include "qik/quiver.hpp"

namespace doctest {
template <>
struct StringMaker<qik::Stability> {
  static String convert(qik::Stability s) { return qik::verdictName(s); }
};
}  // namespace doctest
