#pragma once
// Vector kernels behind the numeric hot paths: policy scoring and gradients
// (matvec, rank-1 updates), embedding normalization and cosine ranking.
//
// A scalar reference implementation always exists. On x86-64 an AVX2+FMA
// variant and on aarch64 a NEON variant of the three primitives (dot, scale,
// axpy) is selected at runtime; matvec/ger are built on top of them. The
// variants are equivalence-tested against the scalar reference.
//
// Results are deterministic for a fixed backend. Selection happens once at
// startup (best available); override with set_backend() or the CLI's
// --kernels flag.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace navkit::kern {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
void set_backend(Backend b);  // throws std::invalid_argument if unavailable
std::vector<Backend> available_backends();
std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);  // "scalar"|"avx2"|"neon"|"auto"

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
void scale(std::span<double> x, double a);                             // x *= a
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x

// w is rows x cols, row-major
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> out);  // out = W x
void matvec_t(std::span<const double> w, std::size_t rows, std::size_t cols,
              std::span<const double> g, std::span<double> out);  // out = W^T g
void ger(std::span<double> w, std::size_t rows, std::size_t cols, double alpha,
         std::span<const double> g, std::span<const double> x);  // W += alpha g x^T

}  // namespace navkit::kern
