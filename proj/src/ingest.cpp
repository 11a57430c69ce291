#include "scalemix/ingest.hpp"

#include <time.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace scalemix {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097LL + static_cast<std::int64_t>(doe) - 719468LL;
}

bool valid_civil(int y, int mo, int d, int h, int mi, int s) {
  static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (y < 1600 || y > 3000 || mo < 1 || mo > 12 || d < 1) return false;
  int dmax = mdays[mo - 1];
  if (mo == 2 && (y % 4 == 0 && (y % 100 != 0 || y % 400 == 0))) dmax = 29;
  return d <= dmax && h >= 0 && h < 24 && mi >= 0 && mi < 60 && s >= 0 && s < 61;
}

// Local wall-clock interpretation is delegated to the C library through the
// TZ environment variable; the guard serializes access to that global.
std::mutex& tz_mutex() {
  static std::mutex m;
  return m;
}

class TzGuard {
 public:
  explicit TzGuard(const std::string& zone) : lock_(tz_mutex()) {
    const char* old = getenv("TZ");
    if (old) saved_ = old;
    had_ = old != nullptr;
    setenv("TZ", zone.c_str(), 1);
    tzset();
  }
  ~TzGuard() {
    if (had_) {
      setenv("TZ", saved_.c_str(), 1);
    } else {
      unsetenv("TZ");
    }
    tzset();
  }

 private:
  std::unique_lock<std::mutex> lock_;
  std::string saved_;
  bool had_ = false;
};

// Parses ISO-8601 with explicit offset: YYYY-MM-DD[T ]HH:MM:SS[.frac](Z|+-HH[:]MM).
// Returns UTC epoch seconds (fractional seconds are truncated).
std::optional<std::int64_t> parse_iso8601(const std::string& text) {
  int y, mo, d, h, mi, s;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d:%2d%n", &y, &mo, &d,
                  &h, &mi, &s, &consumed) != 6) {
    return std::nullopt;
  }
  if (!valid_civil(y, mo, d, h, mi, s)) return std::nullopt;
  const char* rest = text.c_str() + consumed;
  if (*rest == '.') {  // skip fractional seconds
    ++rest;
    while (*rest >= '0' && *rest <= '9') ++rest;
  }
  std::int64_t offset = 0;
  if (*rest == 'Z') {
    ++rest;
  } else if (*rest == '+' || *rest == '-') {
    const int sign = (*rest == '-') ? -1 : 1;
    ++rest;
    int oh = 0, om = 0, n = 0;
    if (std::sscanf(rest, "%2d:%2d%n", &oh, &om, &n) == 2 && rest[2] == ':') {
      rest += n;
    } else if (std::sscanf(rest, "%2d%2d%n", &oh, &om, &n) == 2) {
      rest += n;
    } else if (std::sscanf(rest, "%2d%n", &oh, &n) == 1) {
      rest += n;
    } else {
      return std::nullopt;
    }
    if (oh > 14 || om > 59) return std::nullopt;
    offset = sign * (oh * 3600LL + om * 60LL);
  } else {
    return std::nullopt;  // offset required in this format
  }
  while (*rest == ' ') ++rest;
  if (*rest != '\0') return std::nullopt;
  const std::int64_t local =
      days_from_civil(y, mo, d) * 86400LL + h * 3600LL + mi * 60LL + s;
  return local - offset;
}

// Local wall time in the currently installed TZ to UTC epoch seconds.
std::int64_t local_to_utc(int y, int mo, int d, int h, int mi, int s) {
  struct tm tmv = {};
  tmv.tm_year = y - 1900;
  tmv.tm_mon = mo - 1;
  tmv.tm_mday = d;
  tmv.tm_hour = h;
  tmv.tm_min = mi;
  tmv.tm_sec = s;
  tmv.tm_isdst = -1;  // let the zone rules decide
  return static_cast<std::int64_t>(mktime(&tmv));
}

struct LocalDate {
  int y, mo, d;
  bool operator<(const LocalDate& o) const {
    return std::tie(y, mo, d) < std::tie(o.y, o.mo, o.d);
  }
};

LocalDate utc_to_local_date(std::int64_t utc) {
  time_t t = static_cast<time_t>(utc);
  struct tm tmv = {};
  localtime_r(&t, &tmv);
  return {tmv.tm_year + 1900, tmv.tm_mon + 1, tmv.tm_mday};
}

std::string date_string(const LocalDate& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.y, d.mo, d.d);
  return buf;
}

}  // namespace

std::vector<PriceRecord> load_prices(const std::string& path,
                                     const SessionSpec& spec,
                                     std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);

  std::optional<TzGuard> tz;
  if (!spec.timestamp_format.empty()) tz.emplace(spec.zone);

  std::vector<PriceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("timestamp", 0) == 0) continue;  // header

    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw ParseError("expected 'timestamp,price'", line_no);
    }
    const std::string stamp = line.substr(0, comma);
    const std::string price_text = line.substr(comma + 1);

    std::int64_t utc;
    if (spec.timestamp_format.empty()) {
      const auto parsed = parse_iso8601(stamp);
      if (!parsed) throw ParseError("bad ISO-8601 timestamp '" + stamp + "'", line_no);
      utc = *parsed;
    } else {
      struct tm tmv = {};
      const char* end = strptime(stamp.c_str(), spec.timestamp_format.c_str(), &tmv);
      if (end == nullptr || *end != '\0') {
        throw ParseError("timestamp '" + stamp + "' does not match pattern", line_no);
      }
      tmv.tm_isdst = -1;
      utc = static_cast<std::int64_t>(mktime(&tmv));
    }

    char* pend = nullptr;
    const double price = std::strtod(price_text.c_str(), &pend);
    if (pend == price_text.c_str() || !std::isfinite(price)) {
      throw ParseError("bad price '" + price_text + "'", line_no);
    }
    if (!(price > 0.0)) {
      throw NonPositivePrice("price must be positive, got " + price_text, line_no);
    }
    records.push_back({utc, price});
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const PriceRecord& a, const PriceRecord& b) {
                     return a.utc_seconds < b.utc_seconds;
                   });
  // Duplicate timestamps: the last parsed record wins.
  std::vector<PriceRecord> dedup;
  dedup.reserve(records.size());
  int dup_count = 0;
  for (const auto& r : records) {
    if (!dedup.empty() && dedup.back().utc_seconds == r.utc_seconds) {
      dedup.back() = r;
      ++dup_count;
    } else {
      dedup.push_back(r);
    }
  }
  if (dup_count > 0 && warnings) {
    warnings->push_back("dropped " + std::to_string(dup_count) +
                        " duplicate timestamp(s), keeping the last record");
  }
  return dedup;
}

Ensemble build_ensemble(const std::vector<PriceRecord>& records,
                        const SessionSpec& spec, IngestReport* report) {
  if (spec.bar_count < 1) {
    throw InvalidParameter("build_ensemble: requires bar_count >= 1");
  }
  if (!(spec.min_coverage > 0.0 && spec.min_coverage <= 1.0)) {
    throw InvalidParameter("build_ensemble: requires 0 < min_coverage <= 1");
  }
  if (records.empty()) {
    throw NoCompleteSessions("build_ensemble: no price records");
  }

  TzGuard tz(spec.zone);

  std::map<LocalDate, bool> days;  // distinct local dates
  for (const auto& r : records) days[utc_to_local_date(r.utc_seconds)] = true;

  IngestReport rep;
  rep.days_seen = static_cast<int>(days.size());

  const int points = spec.bar_count + 1;
  const std::int64_t interval = static_cast<std::int64_t>(spec.bar_minutes) * 60;
  std::vector<std::vector<double>> rows;
  std::vector<LocalDate> kept_days;

  for (const auto& [day, unused] : days) {
    (void)unused;
    std::vector<double> prices(points, 0.0);
    std::vector<bool> covered(points, false);
    int n_covered = 0;
    for (int i = 0; i < points; ++i) {
      const std::int64_t grid =
          local_to_utc(day.y, day.mo, day.d, spec.start_hour,
                       spec.start_minute + i * spec.bar_minutes, 0);
      // Last record at or before the grid point, at most one bar old.
      auto it = std::upper_bound(
          records.begin(), records.end(), grid,
          [](std::int64_t g, const PriceRecord& r) { return g < r.utc_seconds; });
      if (it != records.begin()) {
        --it;
        if (it->utc_seconds > grid - interval) {
          prices[i] = it->price;
          covered[i] = true;
          ++n_covered;
        }
      }
    }
    const double coverage = static_cast<double>(n_covered) / points;
    if (coverage + 1e-12 < spec.min_coverage || !covered[0]) {
      ++rep.days_dropped;
      continue;
    }
    // Forward-fill interior gaps from the last sampled price (flat bars).
    for (int i = 1; i < points; ++i) {
      if (!covered[i]) prices[i] = prices[i - 1];
    }
    std::vector<double> row(spec.bar_count);
    for (int i = 1; i < points; ++i) {
      row[i - 1] = std::log(prices[i] / prices[i - 1]);
    }
    rows.push_back(std::move(row));
    kept_days.push_back(day);
  }

  if (rows.empty()) {
    throw NoCompleteSessions("build_ensemble: every day was dropped");
  }

  Ensemble e(static_cast<int>(rows.size()), spec.bar_count);
  for (int l = 0; l < e.histories(); ++l) {
    for (int t = 1; t <= spec.bar_count; ++t) e.ret(l, t) = rows[l][t - 1];
  }
  e.meta.source = "ingested";
  rep.sessions_built = e.histories();
  rep.first_day = date_string(kept_days.front());
  rep.last_day = date_string(kept_days.back());
  e.meta.detail = rep.first_day + ".." + rep.last_day;

  // Subtract the per-bar ensemble mean, matching the analysis convention.
  if (spec.detrend) {
    const double m = static_cast<double>(e.histories());
    for (int t = 1; t <= e.horizon(); ++t) {
      double mean = 0.0;
      for (int l = 0; l < e.histories(); ++l) mean += e.ret(l, t);
      mean /= m;
      for (int l = 0; l < e.histories(); ++l) e.ret(l, t) -= mean;
    }
    e.set_detrended(true);
  }

  if (report) *report = rep;
  return e;
}

EnsembleSummary ensemble_report(const Ensemble& e) {
  EnsembleSummary s;
  s.histories = e.histories();
  s.horizon = e.horizon();
  s.detrended = e.detrended();
  s.source = e.meta.source;
  s.seed = e.meta.seed;
  s.detail = e.meta.detail;
  s.column_mean.resize(e.horizon());
  s.column_variance.resize(e.horizon());
  const double m = static_cast<double>(e.histories());
  for (int t = 1; t <= e.horizon(); ++t) {
    double mean = 0.0;
    for (int l = 0; l < e.histories(); ++l) mean += e.ret(l, t);
    mean /= m;
    double var = 0.0;
    for (int l = 0; l < e.histories(); ++l) {
      const double d = e.ret(l, t) - mean;
      var += d * d;
    }
    s.column_mean[t - 1] = mean;
    s.column_variance[t - 1] = var / m;
  }
  return s;
}

}  // namespace scalemix
