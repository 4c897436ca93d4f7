#pragma once

#include <cstdint>

#include "uosdiff/result_table.hpp"

namespace uosdiff {

/// Fast invariant suite over every module: columns check,status,value where
/// value is the worst observed deviation (or count) for that check.
/// Deterministic in `seed`.
ResultTable run_selftest(std::uint64_t seed);

/// True when every row of a selftest table has status "pass".
bool selftest_passed(const ResultTable& table);

}  // namespace uosdiff
