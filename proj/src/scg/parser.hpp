#pragma once

#include <stdexcept>
#include <string>

#include "scg/model.hpp"

namespace scg {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Line-oriented model grammar; '#' starts a comment, '# @key value' lines
// carry the table meta.  See README for the full grammar.
TermTable parse_model(const std::string& text);
TermTable load_model(const std::string& path);

// Canonical form: meta header, then terms sorted by (sig, gam, alp) powers
// lexicographically, then by noise family; parse(print(t)) == t.
std::string print_model(const TermTable& table);
void save_model(const TermTable& table, const std::string& path);

std::string print_term(const ModelTerm& term);

}  // namespace scg
