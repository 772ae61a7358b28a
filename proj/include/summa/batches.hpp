#pragma once

#include "summa/laws.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace summa {

/// Corpus controls for a verification batch. Unset fields take the law's
/// defaults.
struct BatchOptions {
    std::size_t count = 100;
    std::uint64_t seed = 0;
    std::vector<std::size_t> dims;
    std::optional<std::size_t> arity;
    std::optional<Exponent> p, q, r, s;
    bool exhaustive = true;
    Budget budget;
};

struct BatchResult {
    std::string law_id;
    std::vector<LawReport> reports;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t inconclusive = 0;
    std::map<std::string, double> summary;
    Verdict verdict = Verdict::pass;
};

/// littlewood43, bh, maurey, mixing, coherence, quotient, triviality,
/// inclusion, endpoints.
const std::vector<std::string>& law_ids();

/// Runs one law over a corpus drawn from options.seed. Each instance i gets
/// its own derived seed, so results do not depend on evaluation order.
/// Throws std::invalid_argument for an unknown id or unusable options.
BatchResult run_batch(const std::string& law_id, const BatchOptions& options);

} // namespace summa
