#pragma once

#include <doctest.h>

#include <functional>

#include "degcausal/error.hpp"

// Kind of the degcausal::Error thrown by f; fails the test if none is thrown.
inline degcausal::ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const degcausal::Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return degcausal::ErrorKind::Io;
}

#include <sstream>

#include "degcausal/graph.hpp"

namespace doctest {
template <>
struct StringMaker<degcausal::CausalGraph> {
    static String convert(const degcausal::CausalGraph& g) {
        std::ostringstream os;
        for (int i = 0; i < g.k(); ++i) {
            os << (i ? "|" : "");
            for (int j = 0; j < g.k(); ++j) os << (g.at(i, j) ? '1' : '0');
        }
        return os.str().c_str();
    }
};
}  // namespace doctest
