#include "deckfuse/xml.hpp"

#include <cctype>

#include "deckfuse/errors.hpp"

namespace deckfuse::xml {

namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

class Parser {
public:
    explicit Parser(std::string_view doc) : doc_(doc) {}

    Element parse() {
        skip_prolog();
        Element root = parse_element();
        skip_misc();
        if (pos_ != doc_.size()) fail("content after document root");
        return root;
    }

private:
    std::string_view doc_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

    bool eof() const { return pos_ >= doc_.size(); }
    char peek() const { return doc_[pos_]; }

    char advance() {
        char c = doc_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    bool starts_with(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    void skip_until(std::string_view terminator, const std::string& what) {
        while (!eof()) {
            if (starts_with(terminator)) {
                for (std::size_t i = 0; i < terminator.size(); ++i) advance();
                return;
            }
            advance();
        }
        fail("unterminated " + what);
    }

    void skip_prolog() {
        skip_ws();
        while (!eof()) {
            if (starts_with("<?")) {
                advance();
                advance();
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!--")) {
                for (int i = 0; i < 4; ++i) advance();
                skip_until("-->", "comment");
            } else if (starts_with("<!")) {
                fail("doctype declarations are not supported");
            } else {
                break;
            }
            skip_ws();
        }
        if (eof() || peek() != '<') fail("expected document root element");
    }

    void skip_misc() {
        skip_ws();
        while (!eof() && starts_with("<!--")) {
            for (int i = 0; i < 4; ++i) advance();
            skip_until("-->", "comment");
            skip_ws();
        }
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek())) fail("expected a name");
        std::string name;
        while (!eof() && is_name_char(peek())) name.push_back(advance());
        return name;
    }

    void append_reference(std::string& out) {
        // pos_ is at '&'
        advance();
        std::string ref;
        while (!eof() && peek() != ';') {
            ref.push_back(advance());
            if (ref.size() > 8) fail("malformed entity reference");
        }
        if (eof()) fail("unterminated entity reference");
        advance();  // ';'
        if (ref == "lt") out.push_back('<');
        else if (ref == "gt") out.push_back('>');
        else if (ref == "amp") out.push_back('&');
        else if (ref == "quot") out.push_back('"');
        else if (ref == "apos") out.push_back('\'');
        else if (!ref.empty() && ref[0] == '#') {
            int base = 10;
            std::size_t start = 1;
            if (ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X')) {
                base = 16;
                start = 2;
            }
            unsigned long code = 0;
            if (start >= ref.size()) fail("malformed character reference");
            for (std::size_t i = start; i < ref.size(); ++i) {
                int digit;
                char c = ref[i];
                if (c >= '0' && c <= '9') digit = c - '0';
                else if (base == 16 && c >= 'a' && c <= 'f') digit = c - 'a' + 10;
                else if (base == 16 && c >= 'A' && c <= 'F') digit = c - 'A' + 10;
                else fail("malformed character reference");
                code = code * static_cast<unsigned long>(base) + static_cast<unsigned long>(digit);
                if (code > 0x10FFFF) fail("character reference out of range");
            }
            // ASCII is all the schema ever needs; encode the rest as UTF-8.
            if (code < 0x80) {
                out.push_back(static_cast<char>(code));
            } else if (code < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (code >> 6)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else if (code < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (code >> 12)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xF0 | (code >> 18)));
                out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            }
        } else {
            fail("unknown entity reference '&" + ref + ";'");
        }
    }

    std::string parse_attribute_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        char quote = advance();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '<') fail("'<' in attribute value");
            if (peek() == '&') append_reference(value);
            else value.push_back(advance());
        }
        if (eof()) fail("unterminated attribute value");
        advance();  // closing quote
        return value;
    }

    Element parse_element() {
        std::size_t start_line = line_;
        std::size_t start_col = col_;
        expect('<');
        Element elem;
        elem.line = start_line;
        elem.column = start_col;
        elem.name = parse_name();

        for (;;) {
            bool had_ws = !eof() && std::isspace(static_cast<unsigned char>(peek()));
            skip_ws();
            if (eof()) fail("unterminated start tag");
            if (peek() == '>') {
                advance();
                break;
            }
            if (starts_with("/>")) {
                advance();
                advance();
                return elem;
            }
            if (!had_ws) fail("expected whitespace before attribute");
            Attribute attr;
            attr.name = parse_name();
            for (const auto& existing : elem.attributes)
                if (existing.name == attr.name) fail("duplicate attribute '" + attr.name + "'");
            skip_ws();
            expect('=');
            skip_ws();
            attr.value = parse_attribute_value();
            elem.attributes.push_back(std::move(attr));
        }

        // Content until the matching end tag.
        for (;;) {
            if (eof()) fail("missing end tag for <" + elem.name + ">");
            if (starts_with("<!--")) {
                for (int i = 0; i < 4; ++i) advance();
                skip_until("-->", "comment");
            } else if (starts_with("</")) {
                advance();
                advance();
                std::string close = parse_name();
                if (close != elem.name)
                    fail("end tag </" + close + "> does not match <" + elem.name + ">");
                skip_ws();
                expect('>');
                return elem;
            } else if (starts_with("<?")) {
                advance();
                advance();
                skip_until("?>", "processing instruction");
            } else if (peek() == '<') {
                elem.children.push_back(parse_element());
            } else if (peek() == '&') {
                append_reference(elem.text);
            } else {
                elem.text.push_back(advance());
            }
        }
    }
};

}  // namespace

const std::string* Element::find_attribute(std::string_view attr_name) const {
    for (const auto& a : attributes)
        if (a.name == attr_name) return &a.value;
    return nullptr;
}

const Element* Element::find_child(std::string_view child_name) const {
    for (const auto& c : children)
        if (c.name == child_name) return &c;
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
    std::vector<const Element*> out;
    for (const auto& c : children)
        if (c.name == child_name) out.push_back(&c);
    return out;
}

Element parse_document(std::string_view doc) {
    Parser parser(doc);
    return parser.parse();
}

std::string escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace deckfuse::xml
