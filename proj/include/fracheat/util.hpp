#ifndef FRACHEAT_UTIL_HPP
#define FRACHEAT_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fracheat {

// Deterministic 64-bit generator (splitmix64). We avoid std distributions so
// that identical seeds give identical streams on any toolchain.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) { // inclusive range
    return lo + (int)(next_u64() % (std::uint64_t)(hi - lo + 1));
  }

private:
  std::uint64_t state_;
};

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// (sum_i w_i |v_i|^p)^{1/p}; p = infinity gives max |v_i|.
double weighted_p_norm(const std::vector<double>& v, const std::vector<double>& w, double p);

// Euclidean projection onto the probability simplex {m >= 0, sum m = 1}.
std::vector<double> project_simplex(std::vector<double> v);

// Monotone cubic Hermite (Fritsch-Carlson) interpolation on a sorted grid.
class Pchip {
public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;

private:
  std::vector<double> x_, y_, d_;
};

// Format a double the way every CSV/JSON writer in this project does, so
// outputs are reproducible byte for byte.
std::string format_double(double v);

// RFC-4180ish field quoting: quote when the field contains comma/quote/newline.
std::string csv_field(const std::string& s);

} // namespace fracheat

#endif
