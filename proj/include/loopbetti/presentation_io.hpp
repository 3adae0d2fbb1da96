// Reading and writing DGA presentations as JSON (format 1).
//
//   {
//     "format": 1,
//     "name": "moore",                       optional
//     "ring": "Z",
//     "multiplication": "table",             or "free", default "table"
//     "generators": [{"name": "a", "degree": 2, "weight": 1}, ...],
//     "differential": {"a": [[2, ["b"]]]},   absent generators are cocycles
//     "products": [{"left": "a", "right": "a", "value": [[1, ["c"]]]}],
//     "truncation": 12
//   }
//
// Terms are [coefficient, [letters...]]; table algebras use one letter.
#pragma once

#include "loopbetti/models.hpp"

#include <istream>
#include <string>

namespace loopbetti {

class BadInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses and validates; BadInput messages start with a line:column or a
/// field path such as generators[1].degree.
DGAPresentation read_presentation(std::istream& in, const std::string& source = "<input>");
DGAPresentation load_presentation(const std::string& path);

std::string write_presentation(const DGAPresentation& a);

}  // namespace loopbetti
