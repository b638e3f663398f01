#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ruth {

// Structural errors: shape mismatches, bad indices, unsupported bases.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Syntax errors from the polynomial parser, with a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(std::size_t pos, const std::string& what)
        : Error("parse error at offset " + std::to_string(pos) + ": " + what), pos_(pos) {}
    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

}  // namespace ruth
