#pragma once

#include <span>

#include "dbw/types.hpp"

// Thin FFTW wrapper. Plans are created once per (length, direction) and shared
// between threads; execution uses FFTW's new-array interface, which is
// thread-safe, so callers own all working memory.
namespace dbw::fft {

// In place X_k = sum_t x_t exp(-2 pi i k t / n).
void forward(std::span<cdouble> data);

// In place x_t = sum_k X_k exp(+2 pi i k t / n), unnormalized.
void backward(std::span<cdouble> data);

// X_k for k = 0..n/2 of a real input of length n (out.size() == n/2 + 1).
void forward_real(std::span<const double> in, std::span<cdouble> out);

}  // namespace dbw::fft
