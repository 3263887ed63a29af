#pragma once

#include <doctest.h>

#include "hkreg/error.hpp"

namespace test {

// Runs fn and returns the code of the hkreg::Error it throws.
template <class Fn>
hkreg::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const hkreg::Error& e) {
    return e.code();
  }
  FAIL("expected an hkreg::Error");
  return hkreg::ErrorCode::InvalidArgument;
}

}  // namespace test
