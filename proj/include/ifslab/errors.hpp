#pragma once

#include <stdexcept>
#include <string>

namespace ifslab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical inversion did not reach tolerance (invalid or degenerate lift).
struct ConvergenceFailure : Error { using Error::Error; };

// Word symbol outside {0,...,k-1}.
struct SymbolOutOfRange : Error { using Error::Error; };

// markov_push would exceed the configured atom cap; switch to Monte Carlo.
struct AtomBudgetExceeded : Error { using Error::Error; };

// Exact tree enumeration would exceed the node budget; switch to Monte Carlo.
struct NodeBudgetExceeded : Error { using Error::Error; };

// Probability vector not certified rational by any candidate denominator.
struct NotRational : Error { using Error::Error; };

// No candidate arc shows geometric contraction (e.g. a system of isometries).
struct NoContractionFound : Error { using Error::Error; };

// No m <= m_max makes the target arc reachable from every grid point.
struct NotReached : Error { using Error::Error; };

// No length-m word steers the current point into the target arc.
struct EmptySuccessSet : Error { using Error::Error; };

// Truncated success sets have empty intersection cardinality.
struct NonPositiveCommonCardinality : Error { using Error::Error; };

// Sample variance below resolution; statistic undefined.
struct DegenerateSample : Error { using Error::Error; };

// Config file could not be parsed.
struct ParseError : Error { using Error::Error; };

// Config parsed but violates an invariant.
struct ValidationError : Error { using Error::Error; };

}  // namespace ifslab
