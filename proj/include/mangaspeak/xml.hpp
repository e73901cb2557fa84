#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mspk::xml {

// Small DOM for Manga109-style annotation files. Covers elements, attributes,
// character data, entity references, comments and CDATA; no DTDs, namespaces
// or processing instructions beyond the prolog.
struct Node {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<Node> children;
    std::string text; // concatenated character data of this element
    int line = 0;

    const std::string* attr(std::string_view key) const;
    const Node* child(std::string_view name) const;
    std::vector<const Node*> children_named(std::string_view name) const;
};

// Parse errors are mspk::Error{parse} with "<source>:<line>: message".
Node parse(std::string_view input, const std::string& source_name);
Node parse_file(const std::string& path);

std::string escape_attr(std::string_view raw);
std::string escape_text(std::string_view raw);

} // namespace mspk::xml
