#ifndef DLNR_COMMON_HPP
#define DLNR_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace dlnr {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Input,       // unreadable file, malformed CSV, unknown node, bad range
  Spec,        // unknown term label, invalid model specification
  Fit,         // rank deficiency, degenerate response
  Simulation,  // missing covariates or seed for sampling
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

// ---------------------------------------------------------------------------
// Threading

/// Worker count used when a caller passes 0.
inline unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs fn(task) for task in [0, n_tasks) on up to `threads` workers.
/// Tasks are claimed in strided order, so results must be written to
/// per-task slots for the outcome to be schedule independent.
template <class Fn>
void parallel_for(std::size_t n_tasks, unsigned threads, Fn &&fn) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_tasks));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n_tasks; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n_tasks; k += threads) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &th : pool) th.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Counter-based random numbers
//
// Every draw is a pure function of (seed, stream, replicate, t, i, j), so
// sampling is reproducible regardless of how work is split across threads.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct CounterKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t replicate = 0;
  std::uint64_t t = 0;
  std::uint64_t i = 0;
  std::uint64_t j = 0;
};

inline std::uint64_t counter_bits(const CounterKey &k) {
  std::uint64_t h = mix64(k.seed);
  h = mix64(h ^ k.stream);
  h = mix64(h ^ k.replicate);
  h = mix64(h ^ k.t);
  h = mix64(h ^ k.i);
  h = mix64(h ^ k.j);
  return h;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double counter_uniform(const CounterKey &k) {
  return static_cast<double>(counter_bits(k) >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Numerics

/// Numerically stable logistic function.
inline double logistic(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  double e = std::exp(eta);
  return e / (1.0 + e);
}

/// log(1 + exp(eta)) without overflow.
inline double softplus(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Fixed 10-significant-digit rendering used by every report writer.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Rounds to the value that format_number prints.
inline double round_sig10(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

// ---------------------------------------------------------------------------
// Minimal CSV support: comma separated, header mandatory, no quoting.

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column(std::string_view name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    fail(ErrorKind::Input, source + ": missing column '" + std::string(name) + "'");
  }
};

inline CsvTable parse_csv(std::istream &in, const std::string &source,
                          const std::vector<std::string> &required_header) {
  CsvTable table;
  table.source = source;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      for (const auto &col : required_header) (void)table.column(col);
      continue;
    }
    if (fields.size() != table.header.size())
      fail(ErrorKind::Input, source + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(lineno);
  }
  if (!have_header) fail(ErrorKind::Input, source + ": empty file (header required)");
  return table;
}

inline CsvTable read_csv_file(const std::string &path, const std::vector<std::string> &required_header) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Input, "cannot open file: " + path);
  return parse_csv(in, path, required_header);
}

inline long long parse_integer(const std::string &text, const std::string &where) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(ErrorKind::Input, where + ": not an integer: '" + text + "'");
  return v;
}

inline double parse_real(const std::string &text, const std::string &where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(ErrorKind::Input, where + ": not a number: '" + text + "'");
  return v;
}

}  // namespace dlnr

#endif  // DLNR_COMMON_HPP
