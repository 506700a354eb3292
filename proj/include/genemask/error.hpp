#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace genemask {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A character outside {A,C,G,T} where a validated base was required.
class InvalidBaseError : public Error {
public:
    InvalidBaseError(char base, std::size_t position)
        : Error("invalid base '" + std::string(1, base) + "' at position " +
                std::to_string(position)),
          base_(base), position_(position) {}
    char base() const { return base_; }
    std::size_t position() const { return position_; }

private:
    char base_;
    std::size_t position_;
};

class LengthError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Structurally broken input file (bad FASTA, bad TSV, bad counts block).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ChecksumError : public Error {
public:
    using Error::Error;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class MissingTableError : public Error {
public:
    using Error::Error;
};

class EmptySequenceError : public Error {
public:
    using Error::Error;
};

class InvalidIupacError : public Error {
public:
    explicit InvalidIupacError(char code)
        : Error("invalid IUPAC code '" + std::string(1, code) + "'"), code_(code) {}
    char code() const { return code_; }

private:
    char code_;
};

} // namespace genemask
