#include "scriptwp/script_text.hpp"

#include <cctype>
#include <iostream>
#include <utility>
#include <vector>

namespace scriptwp {

const char* to_string(ParseReason r) {
  switch (r) {
    case ParseReason::UnknownOpcode: return "unknown opcode";
    case ParseReason::MalformedNumber: return "malformed number";
    case ParseReason::MissingPushArgument: return "missing push argument";
  }
  return "";
}

ParseError::ParseError(std::size_t position, std::string token, ParseReason reason)
    : std::runtime_error("token " + std::to_string(position) + " '" + token + "': " + to_string(reason)),
      position_(position),
      token_(std::move(token)),
      reason_(reason) {}

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Dup: return "OP_DUP";
    case Opcode::Hash: return "OP_HASH";
    case Opcode::Equal: return "OP_EQUAL";
    case Opcode::Verify: return "OP_VERIFY";
    case Opcode::CheckSig: return "OP_CHECKSIG";
    case Opcode::CheckLockTimeVerify: return "OP_CHECKLOCKTIMEVERIFY";
    case Opcode::Drop: return "OP_DROP";
    case Opcode::MultiSig: return "OP_MULTISIG";
    case Opcode::Push: return "OP_PUSH";
  }
  return "";
}

namespace {

constexpr std::size_t kMultiSigKeyWarning = 20;

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(c)) {
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '#') ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

std::optional<Opcode> lookup_opcode(std::string_view tok) {
  static const std::pair<std::string_view, Opcode> kTable[] = {
      {"OP_DUP", Opcode::Dup},
      {"OP_HASH", Opcode::Hash},
      {"OP_HASH160", Opcode::Hash},
      {"OP_EQUAL", Opcode::Equal},
      {"OP_VERIFY", Opcode::Verify},
      {"OP_CHECKSIG", Opcode::CheckSig},
      {"OP_CHECKLOCKTIMEVERIFY", Opcode::CheckLockTimeVerify},
      {"OP_DROP", Opcode::Drop},
      {"OP_MULTISIG", Opcode::MultiSig},
      {"OP_CHECKMULTISIG", Opcode::MultiSig},
  };
  for (const auto& [name, op] : kTable)
    if (name == tok) return op;
  return std::nullopt;
}

bool looks_numeric(std::string_view tok) {
  if (!tok.empty() && tok.front() == '<') return true;
  return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-');
}

std::optional<Nat> data_value(std::string_view tok) {
  if (tok.size() >= 2 && tok.front() == '<' && tok.back() == '>') tok = tok.substr(1, tok.size() - 2);
  return parse_nat(tok);
}

}  // namespace

Script parse_script(std::string_view text) {
  auto toks = split_tokens(text);
  Script out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string_view tok = toks[i];
    if (tok == "OP_PUSH") {
      if (i + 1 >= toks.size()) throw ParseError(i, std::string(tok), ParseReason::MissingPushArgument);
      auto v = data_value(toks[i + 1]);
      if (!v) {
        auto reason = looks_numeric(toks[i + 1]) ? ParseReason::MalformedNumber : ParseReason::MissingPushArgument;
        throw ParseError(i + 1, std::string(toks[i + 1]), reason);
      }
      out.push_back(Instruction::push(std::move(*v)));
      ++i;
    } else if (auto op = lookup_opcode(tok)) {
      if (*op == Opcode::MultiSig && !out.empty() && out.back().op() == Opcode::Push &&
          out.back().value() > kMultiSigKeyWarning)
        std::cerr << "warning: OP_MULTISIG with " << out.back().value() << " public keys (above "
                  << kMultiSigKeyWarning << ")\n";
      out.push_back(*op);
    } else if (looks_numeric(tok)) {
      auto v = data_value(tok);
      if (!v) throw ParseError(i, std::string(tok), ParseReason::MalformedNumber);
      out.push_back(Instruction::push(std::move(*v)));
    } else {
      throw ParseError(i, std::string(tok), ParseReason::UnknownOpcode);
    }
  }
  return out;
}

std::string render_script(const Script& script) {
  std::string out;
  for (const auto& instr : script) {
    if (!out.empty()) out += ' ';
    out += instr.op() == Opcode::Push ? to_string(instr.value()) : opcode_name(instr.op());
  }
  return out;
}

}  // namespace scriptwp
