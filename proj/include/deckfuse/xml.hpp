#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace deckfuse::xml {

struct Attribute {
    std::string name;
    std::string value;
};

struct Element {
    std::string name;
    std::vector<Attribute> attributes;
    std::vector<Element> children;
    std::string text;        // concatenated character data directly under this element
    std::size_t line = 0;    // position of the opening '<'
    std::size_t column = 0;

    const std::string* find_attribute(std::string_view attr_name) const;
    const Element* find_child(std::string_view child_name) const;
    std::vector<const Element*> children_named(std::string_view child_name) const;
};

/// Parse a standalone XML document into its root element.
///
/// Supported subset: one root element, nested elements, attributes with
/// single or double quotes, character data, comments, processing
/// instructions (skipped), and the five predefined entities plus numeric
/// character references. No DTDs, namespaces, or CDATA sections.
/// Throws ParseError with 1-based line/column on malformed input.
Element parse_document(std::string_view doc);

/// Escape text for use as attribute value or character data.
std::string escape(std::string_view raw);

}  // namespace deckfuse::xml
