#pragma once

#include <stdexcept>
#include <string>

namespace excised {

// Input outside the mathematical domain of an operation (poles, empty
// ensembles, invalid sizes). The CLI maps this to exit status 1.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A value that should satisfy a structural invariant does not, e.g. a
// matrix handed to the eigenphase extractor is not orthogonal.
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace excised
