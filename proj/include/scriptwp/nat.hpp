#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace scriptwp {

/// Stack elements, messages and times are unbounded naturals.
using Nat = boost::multiprecision::cpp_int;

/// Parses a non-empty run of decimal digits. Anything else yields nullopt.
std::optional<Nat> parse_nat(std::string_view text);

std::string to_string(const Nat& n);

/// Narrowing helper for sizes and counts; nullopt when n does not fit.
std::optional<std::size_t> to_size(const Nat& n);

}  // namespace scriptwp
