#include "graphsense/token_codec.hpp"

#include "graphsense/errors.hpp"

namespace graphsense {

std::shared_ptr<TokenCodec> make_codec(const std::string& name) {
    if (name == "whitespace") return std::make_shared<WhitespaceCodec>();
    throw InvalidConfig("unknown token codec: " + name);
}

} // namespace graphsense
