#pragma once

#include <string>
#include <vector>

#include "codevo/common.hpp"

namespace codevo {

// Result of checking one certificate document.
struct VerifyOutcome {
    // 0 = valid, 1 = parsed but invalid (a verifier rejected it),
    // 2 = malformed document or unknown problem name.
    int exit_code = 2;
    std::string message;
};

// Names accepted by verify_certificate.
const std::vector<std::string>& certificate_problems();

// Checks a plain-text certificate for the named problem family. Documents are
// line-oriented; blank lines and lines starting with '#' are ignored. Formats:
//
//   decomposition       "tensor m n p", "rank R", then R groups of
//                       "term" / "u <m*n entries>" / "v <n*p entries>" /
//                       "w <p*m entries>"; an entry is a half-integer "x" or
//                       complex pair "x,y".
//   kissing             "dim d", then one integer point per line.
//   circles             optional "aspect a", then "x y r" per line.
//   hexagons            "side L", then "x y theta" per line.
//   heilbronn_triangle  one "x y" point per line.
//   heilbronn_convex    one "x y" point per line.
//   ratio               "dim d", then one point per line.
//   step_c1/c2/c3       optional "domain lo hi", then heights (any layout).
//   min_overlap         optional "domain lo hi" (default [0,2]), then heights.
//   sumset              non-negative integers (any layout).
//   uncertainty         expansion coefficients (any layout).
//
// Never throws; problems with the document come back via exit_code/message.
VerifyOutcome verify_certificate(const std::string& problem, const std::string& content);

}  // namespace codevo
