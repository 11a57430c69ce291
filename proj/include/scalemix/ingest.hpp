#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalemix/ensemble.hpp"

namespace scalemix {

struct PriceRecord {
  std::int64_t utc_seconds = 0;  // timezone-normalized epoch timestamp
  double price = 0.0;            // exchange-rate level, > 0
};

struct SessionSpec {
  int start_hour = 9;  // session opening, local wall clock
  int start_minute = 0;
  std::string zone = "America/New_York";
  int bar_minutes = 10;
  int bar_count = 17;        // elementary returns per session
  double min_coverage = 1.0; // required fraction of covered grid points
  bool detrend = true;       // subtract per-bar ensemble means
  // strptime-style pattern for timestamps without an explicit UTC offset;
  // such stamps are interpreted in `zone`. Empty selects ISO-8601 with
  // offset (e.g. 2004-03-01T09:00:00-05:00).
  std::string timestamp_format;
};

// Parses a CSV of (timestamp, price) rows into sorted, deduplicated,
// UTC-normalized records. Duplicate timestamps keep the last row and emit a
// warning. Throws ParseError / NonPositivePrice with the offending line.
std::vector<PriceRecord> load_prices(const std::string& path,
                                     const SessionSpec& spec,
                                     std::vector<std::string>* warnings = nullptr);

struct IngestReport {
  int days_seen = 0;        // distinct local dates with any record
  int sessions_built = 0;
  int days_dropped = 0;     // coverage below min_coverage or leading gap
  int duplicates = 0;
  std::string first_day;    // local date of the first kept session
  std::string last_day;
};

// Builds one history per local calendar day: the price is sampled at
// session_start + i * bar_interval with the last record at or before each
// grid point (and no older than one bar interval), then log-differenced and
// detrended. Throws NoCompleteSessions when nothing survives.
Ensemble build_ensemble(const std::vector<PriceRecord>& records,
                        const SessionSpec& spec,
                        IngestReport* report = nullptr);

struct EnsembleSummary {
  int histories = 0;
  int horizon = 0;
  bool detrended = false;
  std::string source;
  std::optional<std::uint64_t> seed;
  std::string detail;
  std::vector<double> column_mean;
  std::vector<double> column_variance;
};

EnsembleSummary ensemble_report(const Ensemble& e);

}  // namespace scalemix
