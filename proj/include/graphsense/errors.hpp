#pragma once

#include <stdexcept>
#include <string>

namespace graphsense {

// Base class for all pipeline errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Transport failed after retries were exhausted.
struct TransportError : Error {
    using Error::Error;
};

// The provider (or a local precondition) rejected the request shape.
struct ProviderRejection : Error {
    using Error::Error;
};

// Request would exceed the provider context limit; detected locally.
struct BudgetExceeded : Error {
    using Error::Error;
};

struct InvalidConfig : Error {
    using Error::Error;
};

struct EmptyName : Error {
    using Error::Error;
};

struct EmptyGraph : Error {
    using Error::Error;
};

struct UnknownEdge : Error {
    using Error::Error;
};

struct BatchAborted : Error {
    using Error::Error;
};

struct NoSummaries : Error {
    using Error::Error;
};

struct NoIndex : Error {
    using Error::Error;
};

struct QueryFailed : Error {
    using Error::Error;
};

struct JudgeFailed : Error {
    using Error::Error;
};

struct StageIncomplete : Error {
    using Error::Error;
};

struct CorruptStage : Error {
    using Error::Error;
};

struct WorkspaceLocked : Error {
    using Error::Error;
};

} // namespace graphsense
