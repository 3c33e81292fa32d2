#pragma once

#include <stdexcept>
#include <string>

namespace arfrd {

enum class ErrorKind { usage, data, numeric, classification };

//! Base for all library errors; the kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg, long row = -1)
        : Error(ErrorKind::data, msg), row_(row) {}
    //! 1-based data row (header excluded), or -1 when not row specific.
    long row() const { return row_; }

private:
    long row_;
};

class InsufficientSupport : public Error {
public:
    InsufficientSupport(const std::string& side, double h)
        : Error(ErrorKind::numeric,
                "insufficient support at bandwidth h=" + std::to_string(h) + " on the " +
                    side + " side of the cutoff"),
          side_(side), h_(h) {}
    const std::string& side() const { return side_; }
    double h() const { return h_; }

private:
    std::string side_;
    double h_;
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(ErrorKind::numeric, msg) {}
};

class DegenerateVariance : public NumericError {
public:
    explicit DegenerateVariance(const std::string& msg) : NumericError(msg) {}
};

class WeakIdentification : public NumericError {
public:
    explicit WeakIdentification(const std::string& msg) : NumericError(msg) {}
};

class ClassificationFailure : public Error {
public:
    explicit ClassificationFailure(const std::string& msg)
        : Error(ErrorKind::classification, msg) {}
};

inline int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::usage: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numeric: return 4;
    case ErrorKind::classification: return 5;
    }
    return 1;
}

} // namespace arfrd
