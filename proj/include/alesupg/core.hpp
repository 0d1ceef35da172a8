#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace alesupg {

using Index = std::size_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend Vec2 operator/(Vec2 a, double s) { return a *= (1.0 / s); }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or inverted geometry. `cell()` names the first offending cell.
class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, Index cell)
      : Error(what + " (cell " + std::to_string(cell) + ")"), cell_(cell) {}
  Index cell() const { return cell_; }

  /// Same cell, message prefixed with `context`.
  GeometryError(const std::string& context, const GeometryError& inner)
      : Error(context + inner.what()), cell_(inner.cell_) {}

 private:
  Index cell_;
};

class TangledMeshError : public GeometryError {
 public:
  using GeometryError::GeometryError;
  TangledMeshError(const std::string& context, const TangledMeshError& inner) : GeometryError(context, inner) {}
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = -1.0) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace alesupg
