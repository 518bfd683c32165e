#pragma once

// Text format, one tensor per file:
//
//   rect-tensor v1 r s n m
//   i1 .. ir j1 .. js value      (1-based indices, one nonzero per line)
//
// Lines starting with '#' and blank lines are ignored. A repeated index tuple
// keeps the last value and emits a warning on the diagnostic stream.

#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rectspec/tensor.hpp"

namespace rectspec {

namespace detail {

inline bool is_blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline std::size_t parse_positive(const std::string& tok, std::size_t line,
                                  const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty() || tok[0] == '-' || v == 0)
    throw ParseError(line, std::string("expected positive integer for ") + what +
                               ", got '" + tok + "'");
  return static_cast<std::size_t>(v);
}

inline double parse_real(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty() || !std::isfinite(v))
    throw ParseError(line, "expected a finite decimal value, got '" + tok + "'");
  return v;
}

// 17 significant digits round-trips every double.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// First non-comment token sequence of a stream, used for format detection.
inline std::string peek_header(const std::string& text) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!detail::is_blank_or_comment(line)) return line;
  return {};
}

inline RectTensor parse_tensor(std::istream& in, std::ostream* warnings = nullptr,
                               Storage storage = Storage::automatic) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    header = detail::split_ws(line);
    break;
  }
  if (header.empty()) throw ParseError(lineno, "missing 'rect-tensor v1' header");
  if (header.size() != 6 || header[0] != "rect-tensor" || header[1] != "v1")
    throw ParseError(lineno, "header must read 'rect-tensor v1 r s n m'");
  const TensorShape shape{detail::parse_positive(header[2], lineno, "r"),
                          detail::parse_positive(header[3], lineno, "s"),
                          detail::parse_positive(header[4], lineno, "n"),
                          detail::parse_positive(header[5], lineno, "m")};
  TensorBuilder builder(shape);
  const std::size_t ord = shape.order();
  std::vector<Index> lower(shape.r), upper(shape.s);
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank_or_comment(line)) continue;
    const auto tok = detail::split_ws(line);
    if (tok.size() != ord + 1)
      throw ParseError(lineno, "expected " + std::to_string(ord) +
                                   " indices and a value, got " +
                                   std::to_string(tok.size()) + " fields");
    for (std::size_t k = 0; k < ord; ++k) {
      const std::size_t range = k < shape.r ? shape.n : shape.m;
      const std::size_t v = detail::parse_positive(tok[k], lineno, "index");
      if (v > range)
        throw ParseError(lineno, std::string(k < shape.r ? "lower" : "upper") +
                                     " index " + tok[k] + " outside [1.." +
                                     std::to_string(range) + "]");
      (k < shape.r ? lower[k] : upper[k - shape.r]) = static_cast<Index>(v - 1);
    }
    if (builder.set(lower, upper, detail::parse_real(tok[ord], lineno)) &&
        warnings)
      *warnings << "warning: line " << lineno
                << ": duplicate index tuple, last value wins\n";
  }
  return builder.build(storage);
}

inline RectTensor parse_tensor(const std::string& text,
                               std::ostream* warnings = nullptr,
                               Storage storage = Storage::automatic) {
  std::istringstream in(text);
  return parse_tensor(in, warnings, storage);
}

inline void write_tensor(std::ostream& out, const RectTensor& a) {
  const auto& sh = a.shape();
  out << "rect-tensor v1 " << sh.r << ' ' << sh.s << ' ' << sh.n << ' ' << sh.m
      << '\n';
  a.for_each_nonzero([&](std::span<const Index> idx, double v) {
    for (Index i : idx) out << (i + 1) << ' ';
    out << detail::format_real(v) << '\n';
  });
}

inline std::string to_text(const RectTensor& a) {
  std::ostringstream out;
  write_tensor(out, a);
  return out.str();
}

}  // namespace rectspec
