#include "mangaspeak/xml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mangaspeak/errors.hpp"

namespace mspk::xml {

const std::string* Node::attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
        if (k == key) return &v;
    return nullptr;
}

const Node* Node::child(std::string_view name) const {
    for (const auto& c : children)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view name) const {
    std::vector<const Node*> out;
    for (const auto& c : children)
        if (c.name == name) out.push_back(&c);
    return out;
}

namespace {

class Parser {
public:
    Parser(std::string_view input, const std::string& source)
        : in_(input), src_(source) {}

    Node run() {
        skip_prolog();
        Node root = parse_element();
        skip_misc();
        if (pos_ != in_.size()) fail("trailing content after document element");
        return root;
    }

private:
    std::string_view in_;
    std::string src_;
    size_t pos_ = 0;
    int line_ = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        raise(Error::Code::parse, src_ + ":" + std::to_string(line_) + ": " + msg);
    }

    bool eof() const { return pos_ >= in_.size(); }
    char peek() const { return in_[pos_]; }

    char get() {
        char c = in_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    bool starts_with(std::string_view s) const {
        return in_.substr(pos_, s.size()) == s;
    }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) get();
    }

    void skip_comment() {
        // positioned at "<!--"
        pos_ += 4;
        while (!eof()) {
            if (starts_with("-->")) {
                pos_ += 3;
                return;
            }
            get();
        }
        fail("unterminated comment");
    }

    void skip_prolog() {
        skip_ws();
        if (starts_with("<?xml")) {
            while (!eof() && !starts_with("?>")) get();
            if (eof()) fail("unterminated XML declaration");
            pos_ += 2;
        }
        skip_misc();
        if (eof()) fail("no document element");
    }

    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                skip_comment();
                continue;
            }
            if (starts_with("<!DOCTYPE")) {
                while (!eof() && peek() != '>') get();
                if (eof()) fail("unterminated DOCTYPE");
                get();
                continue;
            }
            return;
        }
    }

    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
               c == '.' || c == ':';
    }

    std::string parse_name() {
        size_t start = pos_;
        while (!eof() && name_char(peek())) get();
        if (pos_ == start) fail("expected a name");
        return std::string(in_.substr(start, pos_ - start));
    }

    void decode_entity(std::string& out) {
        // positioned at '&'
        get();
        size_t start = pos_;
        while (!eof() && peek() != ';' && pos_ - start < 12) get();
        if (eof() || peek() != ';') fail("malformed entity reference");
        std::string ent(in_.substr(start, pos_ - start));
        get(); // ';'
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else if (ent == "apos") out += '\'';
        else if (!ent.empty() && ent[0] == '#') {
            int base = 10;
            std::string digits = ent.substr(1);
            if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
                base = 16;
                digits = digits.substr(1);
            }
            unsigned long cp = 0;
            try {
                size_t used = 0;
                cp = std::stoul(digits, &used, base);
                if (used != digits.size() || digits.empty()) throw std::invalid_argument("");
            } catch (...) {
                fail("malformed character reference '&" + ent + ";'");
            }
            append_utf8(out, cp);
        } else {
            fail("unknown entity '&" + ent + ";'");
        }
    }

    static void append_utf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
        const char quote = get();
        std::string value;
        while (!eof() && peek() != quote) {
            if (peek() == '&') decode_entity(value);
            else if (peek() == '<') fail("'<' in attribute value");
            else value += get();
        }
        if (eof()) fail("unterminated attribute value");
        get();
        return value;
    }

    Node parse_element() {
        expect('<');
        Node node;
        node.line = line_;
        node.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag <" + node.name + ">");
            if (peek() == '/') {
                get();
                expect('>');
                return node; // self-closing
            }
            if (peek() == '>') {
                get();
                break;
            }
            std::string key = parse_name();
            skip_ws();
            expect('=');
            skip_ws();
            for (const auto& [k, v] : node.attrs)
                if (k == key) fail("duplicate attribute '" + key + "' on <" + node.name + ">");
            node.attrs.emplace_back(std::move(key), parse_attr_value());
        }
        parse_content(node);
        return node;
    }

    void parse_content(Node& node) {
        for (;;) {
            if (eof()) fail("missing closing tag </" + node.name + ">");
            if (peek() == '<') {
                if (starts_with("<!--")) {
                    skip_comment();
                    continue;
                }
                if (starts_with("<![CDATA[")) {
                    pos_ += 9;
                    while (!eof() && !starts_with("]]>")) node.text += get();
                    if (eof()) fail("unterminated CDATA section");
                    pos_ += 3;
                    continue;
                }
                if (in_.substr(pos_, 2) == "</") {
                    pos_ += 2;
                    std::string closing = parse_name();
                    if (closing != node.name)
                        fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
                    skip_ws();
                    expect('>');
                    return;
                }
                node.children.push_back(parse_element());
                continue;
            }
            if (peek() == '&') {
                decode_entity(node.text);
                continue;
            }
            node.text += get();
        }
    }
};

} // namespace

Node parse(std::string_view input, const std::string& source_name) {
    return Parser(input, source_name).run();
}

Node parse_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) raise(Error::Code::io, "cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str(), path);
}

std::string escape_attr(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace mspk::xml
