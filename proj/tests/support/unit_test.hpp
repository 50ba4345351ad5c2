#pragma once

#include <doctest.h>

#include "test_util.hpp"

// Asserts that `expr` throws patchseg::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected_code)                                   \
  do {                                                                          \
    bool thrown_ = false;                                                       \
    try {                                                                       \
      (void)(expr);                                                             \
    } catch (const patchseg::Error& e_) {                                       \
      thrown_ = true;                                                           \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what());                   \
    }                                                                           \
    CHECK_MESSAGE(thrown_, "expected " #expected_code " from " #expr);          \
  } while (0)
