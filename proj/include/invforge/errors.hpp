#pragma once

#include <stdexcept>
#include <string>

namespace invforge {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define INVFORGE_ERROR(Name)                                                                                           \
    class Name : public Error {                                                                                        \
    public:                                                                                                            \
        using Error::Error;                                                                                            \
    }

// kernel
INVFORGE_ERROR(CyclicSubstitution);
INVFORGE_ERROR(DivisionByZeroPolynomial);
INVFORGE_ERROR(UnsupportedForm);
INVFORGE_ERROR(UnboundSymbol);
INVFORGE_ERROR(NumericDomain);

// parser
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, int line, int column)
        : Error(message + " at line " + std::to_string(line) + ", column " + std::to_string(column)), line_(line),
          column_(column)
    {
    }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class UnknownIdentifier : public SyntaxError {
public:
    UnknownIdentifier(const std::string& name, int line, int column)
        : SyntaxError("unknown identifier '" + name + "'", line, column), name_(name)
    {
    }
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// group action
INVFORGE_ERROR(SingularGroupElement);
INVFORGE_ERROR(MissingJet);

// moving frame and invariant structure
INVFORGE_ERROR(FrameUnsolvable);
INVFORGE_ERROR(FrameOrderTooLow);
INVFORGE_ERROR(InvalidIndex);
INVFORGE_ERROR(InvalidOrder);
INVFORGE_ERROR(GeneratorDegenerate);

// harness
INVFORGE_ERROR(NoRegularPoint);

#undef INVFORGE_ERROR

} // namespace invforge
