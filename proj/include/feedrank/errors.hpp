#pragma once

#include <stdexcept>
#include <string>

namespace feedrank {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A session with zero chosen headlines reached a profile computation.
class EmptySession : public Error {
public:
    EmptySession() : Error("session has no chosen headlines") {}
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class EmptyChoice : public Error {
public:
    EmptyChoice() : Error("chosen set is empty") {}
};

class DegenerateSeries : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed XML. `offset` is the byte position reported by the parser.
class ParseError : public Error {
public:
    ParseError(std::string reason, long line, long column, long offset)
        : Error("parse error at line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + reason),
          reason_(std::move(reason)), line_(line), column_(column), offset_(offset) {}

    const std::string& reason() const noexcept { return reason_; }
    long line() const noexcept { return line_; }
    long column() const noexcept { return column_; }
    long offset() const noexcept { return offset_; }

private:
    std::string reason_;
    long line_;
    long column_;
    long offset_;
};

/// Well-formed XML whose root is neither <rss> nor Atom <feed>.
class UnknownFormat : public Error {
public:
    using Error::Error;
};

class NetworkError : public Error {
public:
    using Error::Error;
};

class HttpError : public Error {
public:
    explicit HttpError(int status)
        : Error("unexpected HTTP status " + std::to_string(status)), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class StorageError : public Error {
public:
    using Error::Error;
};

/// Optimistic-concurrency failure: the stored state moved underneath the writer.
class ConflictError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

}  // namespace feedrank
