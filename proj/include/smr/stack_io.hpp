#ifndef SMR_STACK_IO_HPP
#define SMR_STACK_IO_HPP

#include "smr/stack.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace smr {

// Stack-definition file: structured key-value text with three sections.
// Layers are listed top to bottom; `repeat N ... end` expands mirror pairs.
// All quantities take optional unit suffixes (nm, um, GHz, ...).
//
//   # comment to end of line
//   [materials]
//   <name>  density=<q>  velocity=<q>  q=<q>  [e33=<q>  eps33=<q>]
//
//   [stack]
//   <material> <thickness> [piezo]
//   repeat <N>
//   <material> <thickness>
//   ...
//   end
//
//   [geometry]
//   area      = <q>
//   substrate = <material>
//   top       = free | loaded <material>
//
// Unknown sections, keys, and trailing tokens are rejected. Every error
// carries the offending line (and column where applicable).

/// One raw line of an extra section (e.g. [inverse]), for callers that
/// extend the dialect.
struct RawLine {
    int line_no = 0;
    std::string text;
};

/// A parsed stack-definition document.
struct StackDocument {
    std::vector<Material> materials; // declaration order
    Stack stack;
    std::map<std::string, std::vector<RawLine>> extra_sections;
};

/// Parse a full document. Sections named in `extra_sections` are collected
/// verbatim into StackDocument::extra_sections instead of being rejected.
/// Throws ParseError with line/column on any violation.
StackDocument parse_stack_document(const std::string& text,
                                   std::span<const std::string> extra_sections = {});

/// Parse text and return just the validated Stack.
Stack parse_stack_file(const std::string& text);

/// Parse a document that needs only a [materials] section.
std::map<std::string, Material> parse_materials_file(const std::string& text);

/// Serialize a stack into the file dialect; parse_stack_file of the result
/// reproduces the stack exactly. Throws std::invalid_argument when two
/// distinct materials share a name.
std::string serialize_stack_file(const Stack& s);

/// Serialize one material line in the [materials] dialect.
std::string material_line(const Material& m);

} // namespace smr

#endif // SMR_STACK_IO_HPP
