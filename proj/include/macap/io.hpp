#pragma once

#include <string>

#include "macap/games.hpp"
#include "macap/prob.hpp"

namespace macap {

// MAC document: JSON with integer keys d1, d2, dout and a nested decimal
// array transition[z][b1][b2]. Stochasticity tolerance 1e-9.
Mac parse_mac_file(const std::string& path);
Mac parse_mac_text(const std::string& text, const std::string& origin = "<string>");
void write_mac_file(const std::string& path, const Mac& mac);
std::string mac_to_text(const Mac& mac);

// Game document: keys players, question_sizes, answer_sizes, winning
// (array of [question-tuple, answer-tuple] index arrays, 0-based).
// "builtin:<name>" strings dispatch to the built-in constructors:
// chsh, magic_square, multiparty_parity:<N>, signalling:<m1>:<m2>.
NonlocalGame parse_game_file(const std::string& path_or_builtin);
NonlocalGame parse_game_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace macap
