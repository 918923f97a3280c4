#pragma once

#include <stdexcept>
#include <string>

namespace rpqview {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};
struct UnknownNode : Error {
    using Error::Error;
};
struct UnknownLabel : Error {
    using Error::Error;
};
struct UnknownSymbol : Error {
    using Error::Error;
};
struct UnknownState : Error {
    using Error::Error;
};
struct PartialMap : Error {
    using Error::Error;
};
struct EmptyViewSet : Error {
    using Error::Error;
};
struct AlphabetMismatch : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct CertificateFailure : Error {
    using Error::Error;
};
struct ResourceLimit : Error {
    using Error::Error;
};
struct EmissionTooLarge : Error {
    using Error::Error;
};
struct UnboundHeadVariable : Error {
    using Error::Error;
};
struct BudgetExceeded : Error {
    using Error::Error;
};
struct NotAViewImage : Error {
    using Error::Error;
};
struct NotConnected : Error {
    using Error::Error;
};
struct FixtureMismatch : Error {
    using Error::Error;
};
struct UndeclaredSymbol : Error {
    using Error::Error;
};

} // namespace rpqview
