#pragma once

#include "summa/batches.hpp"
#include "summa/estimate.hpp"
#include "summa/summing.hpp"
#include "summa/tensors.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace summa {

inline constexpr const char* kInstanceVersion = "summa-instance/1";
inline constexpr const char* kToolVersion = "1.0.0";

/// Malformed or inconsistent instance file. line and column are 1-based, 0
/// when unknown (for instance a file that cannot be opened).
class InstanceError : public std::runtime_error {
public:
    InstanceError(const std::string& message, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct Instance {
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, SpaceSpec>> spaces;
    std::vector<std::pair<std::string, MultilinearMap>> tensors;
    std::vector<std::pair<std::string, VectorFamily>> families;
    std::optional<SummingParams> params;
    std::string comment;
};

/// Exponents travel as JSON numbers, with ∞ as the string "inf".
nlohmann::json exponent_json(const Exponent& e);
Exponent exponent_from_json(const nlohmann::json& j);

/// Parses and validates an instance. The space name "K" denotes the scalar
/// field unless the file defines it. Errors carry the line of the offending
/// value.
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);

/// Nested data arrays; object keys come out sorted.
std::string dump_instance(const Instance& instance);

nlohmann::json to_json(const SpaceSpec& s);
nlohmann::json to_json(const VectorFamily& fam);
nlohmann::json to_json(const SummingParams& params);
nlohmann::json to_json(const Budget& budget);
nlohmann::json to_json(const Witness& witness);
nlohmann::json to_json(const NormEstimate& estimate);
nlohmann::json to_json(const LawReport& report);
nlohmann::json to_json(const BatchResult& batch);

/// {tool, version, command, seed, wall_time_s, items}.
nlohmann::json report_file(const std::vector<std::string>& command, std::uint64_t seed, double wall_time_s,
                           nlohmann::json items);

/// The report with wall_time_s removed, serialized; equal strings mean the
/// runs agree.
std::string canonical_report(const nlohmann::json& report);

} // namespace summa
