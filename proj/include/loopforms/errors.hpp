#ifndef LOOPFORMS_ERRORS_HPP
#define LOOPFORMS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace loopforms {

/* Operational errors exit the CLI with code 2, verification failures with
 * code 3. Everything derives from Error so the CLI can map uniformly. */
struct Error : std::runtime_error {
    enum class Kind { Operational, Verification };
    Kind kind;
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct ParseError : Error {
    int line, col;
    ParseError(int line_, int col_, const std::string& msg)
        : Error(Kind::Operational,
                "parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_) {}
};

struct GradingError : Error {
    explicit GradingError(const std::string& msg) : Error(Kind::Operational, "grading error: " + msg) {}
};

struct SignError : Error {
    explicit SignError(const std::string& msg) : Error(Kind::Operational, "sign error: " + msg) {}
};

struct UnknownGenerator : Error {
    explicit UnknownGenerator(const std::string& name)
        : Error(Kind::Operational, "unknown generator: " + name) {}
};

struct InfiniteBasis : Error {
    explicit InfiniteBasis(const std::string& msg) : Error(Kind::Operational, "infinite basis: " + msg) {}
};

struct NonterminationGuard : Error {
    explicit NonterminationGuard(const std::string& msg)
        : Error(Kind::Operational, "rewriting basis exceeded cap: " + msg) {}
};

struct CompositionNonzero : Error {
    explicit CompositionNonzero(const std::string& msg)
        : Error(Kind::Operational, "d_out * d_in != 0: " + msg) {}
};

struct NotChainMap : Error {
    explicit NotChainMap(const std::string& msg) : Error(Kind::Operational, "not a chain map: " + msg) {}
};

struct UnboundedWeight : Error {
    explicit UnboundedWeight(const std::string& msg)
        : Error(Kind::Operational, "unbounded weight slice: " + msg) {}
};

struct NotSmooth : Error {
    explicit NotSmooth(const std::string& msg) : Error(Kind::Operational, "not smooth: " + msg) {}
};

struct NotFlat : Error {
    explicit NotFlat(const std::string& msg) : Error(Kind::Operational, "connection not flat: " + msg) {}
};

struct NotCentral : Error {
    explicit NotCentral(const std::string& msg) : Error(Kind::Operational, "curvature not central: " + msg) {}
};

struct SlotCapExceeded : Error {
    explicit SlotCapExceeded(const std::string& msg)
        : Error(Kind::Operational, "slot dimension cap exceeded: " + msg) {}
};

/* Failures that falsify a checked identity; these must surface loudly. */
struct MixedIdentityFailure : Error {
    explicit MixedIdentityFailure(const std::string& msg)
        : Error(Kind::Verification, "mixed identity failure: " + msg) {}
};

struct NoScalarWorks : Error {
    explicit NoScalarWorks(const std::string& msg)
        : Error(Kind::Verification, "no scalar verifies B = c*d: " + msg) {}
};

}  // namespace loopforms

#endif
