#pragma once

#include <stdexcept>
#include <string>

namespace niss {

// Base class for all library errors. Subclasses map 1:1 onto the CLI exit
// codes (see tools/): parse 2, validation/constraint 3, size cap 4.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// A probability source (pmf, marginal, Bernoulli parameter) failed validation.
class invalid_source_error : public error {
public:
    using error::error;
};

// Dimensions or alphabet sizes of two arguments do not agree.
class shape_error : public error {
public:
    using error::error;
};

// A scalar argument is outside its admissible interval.
class range_error : public error {
public:
    using error::error;
};

// A table expected to hold alphabet symbols contains a non-symbol entry.
class alphabet_error : public error {
public:
    using error::error;
};

// A function family violates the relaxation constraints.
class constraint_error : public error {
public:
    using error::error;
};

// A malformed argument (empty list, zero sample count, bad subset member).
class argument_error : public error {
public:
    using error::error;
};

// An enumeration or grid would exceed its configured cap.
class size_error : public error {
public:
    using error::error;
};

// A correlation vector is inconsistent with the requested marginals.
class infeasible_error : public error {
public:
    using error::error;
};

// Input file could not be parsed into the expected schema.
class parse_error : public error {
public:
    using error::error;
};

} // namespace niss
