#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "scriptwp/vm.hpp"

namespace scriptwp {

enum class ParseReason { UnknownOpcode, MalformedNumber, MissingPushArgument };

const char* to_string(ParseReason r);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::string token, ParseReason reason);

  /// Index into the whitespace-separated token sequence.
  std::size_t position() const { return position_; }
  const std::string& token() const { return token_; }
  ParseReason reason() const { return reason_; }

 private:
  std::size_t position_;
  std::string token_;
  ParseReason reason_;
};

/// Whitespace-separated opcodes. Data is a bare decimal, `<n>`, or
/// `OP_PUSH n`. `#` starts a comment running to the end of the line.
/// Throws ParseError on the first offending token.
Script parse_script(std::string_view text);

/// Canonical form: single spaces, pushes as bare decimals.
std::string render_script(const Script& script);

const char* opcode_name(Opcode op);

}  // namespace scriptwp
