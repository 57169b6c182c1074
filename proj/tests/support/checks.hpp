#pragma once

#include <doctest.h>

#include "modmark/error.hpp"

// Asserts that an expression throws modmark::Error with the given code.
#define CHECK_ERRC(expr, expected)                    \
    do {                                              \
        bool threw_expected_ = false;                 \
        try {                                         \
            (void)(expr);                             \
        } catch (const modmark::Error& e_) {          \
            threw_expected_ = e_.code() == (expected);\
            CHECK(e_.code() == (expected));           \
        }                                             \
        CHECK_MESSAGE(threw_expected_, #expr);        \
    } while (0)
