#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lowrank/experiments.hpp"

namespace lowrank {

/// Header plus one row per trial:
/// method,trial,seed,ok,error,seconds,rank,note,atoms
/// where atoms is `modulus:angle:phase:coefficient` entries joined by ';'.
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);
std::vector<TrialResult> read_trials_csv(std::istream& in);

/// Structured summary document (JSON).
std::string summary_json(const Summary& s);
/// Fixed-width table for terminals.
std::string summary_table(const Summary& s);

/// Writes trials.csv, summary.json and summary.txt into `dir` (created if needed).
void write_report(const std::string& dir, const MonteCarloResult& result);

}  // namespace lowrank
