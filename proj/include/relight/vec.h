// Small vector and color types shared by every module.
#pragma once

#include <cmath>
#include <stdexcept>

namespace relight {

inline constexpr double pi = 3.14159265358979323846;

struct vec3 {
  double x = 0, y = 0, z = 0;
};

constexpr vec3 operator+(const vec3& a, const vec3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
constexpr vec3 operator-(const vec3& a, const vec3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
constexpr vec3 operator-(const vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr vec3 operator*(const vec3& a, double s) {
  return {a.x * s, a.y * s, a.z * s};
}
constexpr vec3 operator*(double s, const vec3& a) { return a * s; }
constexpr vec3 operator/(const vec3& a, double s) {
  return {a.x / s, a.y / s, a.z / s};
}
constexpr bool operator==(const vec3& a, const vec3& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

constexpr double dot(const vec3& a, const vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr vec3 cross(const vec3& a, const vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const vec3& a) { return std::sqrt(dot(a, a)); }

// Clamped cosine, the <a.b> operator of the shading model.
constexpr double cdot(const vec3& a, const vec3& b) {
  const double d = dot(a, b);
  return d < 0 ? 0 : (d > 1 ? 1 : d);
}

// Unit-length 3-vector. Construction normalizes; a zero vector is rejected.
class Direction {
 public:
  Direction() = default;
  Direction(double x, double y, double z) : Direction(vec3{x, y, z}) {}
  explicit Direction(const vec3& v) {
    const double len = length(v);
    if (!(len > 0) || !std::isfinite(len))
      throw std::domain_error("direction: zero or non-finite vector");
    v_ = v / len;
  }

  // Wraps a vector already known to be unit length (no renormalization).
  static Direction from_unit(const vec3& v) {
    Direction d;
    d.v_ = v;
    return d;
  }

  const vec3& vec() const { return v_; }
  operator const vec3&() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }

  friend bool operator==(const Direction& a, const Direction& b) {
    return a.v_ == b.v_;
  }

 private:
  vec3 v_ = {0, 0, 1};
};

// Linear RGB radiance or reflectance.
struct Rgb {
  double r = 0, g = 0, b = 0;

  constexpr double& operator[](int i) { return i == 0 ? r : (i == 1 ? g : b); }
  constexpr double operator[](int i) const {
    return i == 0 ? r : (i == 1 ? g : b);
  }
  constexpr Rgb& operator+=(const Rgb& o) {
    r += o.r;
    g += o.g;
    b += o.b;
    return *this;
  }
};

constexpr Rgb operator+(const Rgb& a, const Rgb& b) {
  return {a.r + b.r, a.g + b.g, a.b + b.b};
}
constexpr Rgb operator-(const Rgb& a, const Rgb& b) {
  return {a.r - b.r, a.g - b.g, a.b - b.b};
}
constexpr Rgb operator*(const Rgb& a, const Rgb& b) {
  return {a.r * b.r, a.g * b.g, a.b * b.b};
}
constexpr Rgb operator*(const Rgb& a, double s) {
  return {a.r * s, a.g * s, a.b * s};
}
constexpr Rgb operator*(double s, const Rgb& a) { return a * s; }
constexpr Rgb operator/(const Rgb& a, double s) {
  return {a.r / s, a.g / s, a.b / s};
}
constexpr bool operator==(const Rgb& a, const Rgb& b) {
  return a.r == b.r && a.g == b.g && a.b == b.b;
}

constexpr Rgb gray(double v) { return {v, v, v}; }

// Rec. 709 luminance.
constexpr double luminance(const Rgb& c) {
  return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b;
}

inline bool is_finite(const Rgb& c) {
  return std::isfinite(c.r) && std::isfinite(c.g) && std::isfinite(c.b);
}
inline double max_component(const Rgb& c) {
  return std::fmax(c.r, std::fmax(c.g, c.b));
}

}  // namespace relight
