#pragma once

#include <functional>

#include <gtest/gtest.h>

#include "biharm/error.hpp"

namespace biharm::testing {

/// Runs `fn` and returns the code of the Error it throws.
inline ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::kInvalidInput;
}

} // namespace biharm::testing
