#ifndef CSIMPLEX_HYPOTHESES_HPP
#define CSIMPLEX_HYPOTHESES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csimplex/system.hpp"
#include "csimplex/types.hpp"

namespace csimplex {

enum class H4Mode { weak, strict };

/// Sampled numerical evidence for one growth-rate hypothesis.  Never a proof;
/// `budget` records how much sampling went into the verdict.
struct HypothesisReport {
    std::string hypothesis;        // "H2" | "H3tilde" | "H4" | "H4strict"
    bool passed = false;
    Vec values;                    // per-species (or per-pair) figures of merit
    std::map<std::string, double> witness;   // worst sampled point, if any
    std::map<std::string, double> budget;
};

/// H2: each average per-capita growth rate at the origin must be positive.
/// Integrals are computed by adaptive Simpson quadrature split at the
/// breakpoints; passes iff every integral exceeds quad_tol.
HypothesisReport check_H2(const SystemSpec& spec, double quad_tol = 1e-12);

/// H3-tilde: g_i(t, M e_i) <= 0 on a sampling grid of each smooth piece.
HypothesisReport check_H3tilde(const SystemSpec& spec, double M, int samples = 256);

/// Search M in {1, 2, 4, ..., M_cap} for which check_H3tilde passes.
/// Returns the passing report (with "M" in budget); the largest-M report
/// otherwise.
HypothesisReport find_H3tilde_M(const SystemSpec& spec, double M_cap = 1024.0,
                                int samples = 256);

/// H4 / H4': finite-difference competitiveness evidence on random samples.
/// weak mode asserts g_i(t, x + h e_j) <= g_i(t, x) for all i; strict mode
/// additionally requires, for every (i,j), at least one sampled time with a
/// strict decrease (values then hold the per-pair observation fractions,
/// flattened row-major).
HypothesisReport check_H4(const SystemSpec& spec, int pairs, H4Mode mode,
                          std::uint64_t seed);

}  // namespace csimplex

#endif
