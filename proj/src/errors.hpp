#pragma once

#include <stdexcept>
#include <string>

namespace specgap {

// Bad input: malformed documents, out-of-range parameters, violated
// preconditions. Maps to exit code 2 / SG_ERR_INVALID at the C boundary.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical defect: non-convergence, conditioning failure, or a certified
// inequality that did not hold at runtime. Maps to exit code 3 /
// SG_ERR_NUMERIC at the C boundary.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace specgap
