#pragma once

#include <span>

#include "dcsim/kernels.hpp"

// Backend implementations behind the dispatch in kernels.cpp.
namespace dcsim::kernels {

namespace reference {
void u_rate(const Grid& g, std::span<const double> u, std::span<const double> v, const ModelParams& p,
            bool upwind, std::span<double> out);
void laplacian(const Grid& g, std::span<const double> x, std::span<double> out);
void helmholtz_apply(const Grid& g, double dt, double decay, std::span<const double> x,
                     std::span<double> out);
void helmholtz_diagonal(const Grid& g, double dt, double decay, std::span<double> out);
void exp_decay(std::span<const double> w, std::span<const double> z, double dt, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_value(std::span<const double> x);
double min_value(std::span<const double> x);
double max_abs(std::span<const double> x);
double max_face_gradient(const Grid& g, std::span<const double> x);
}  // namespace reference

namespace omp {
void u_rate(const Grid& g, std::span<const double> u, std::span<const double> v, const ModelParams& p,
            bool upwind, std::span<double> out);
void laplacian(const Grid& g, std::span<const double> x, std::span<double> out);
void helmholtz_apply(const Grid& g, double dt, double decay, std::span<const double> x,
                     std::span<double> out);
void helmholtz_diagonal(const Grid& g, double dt, double decay, std::span<double> out);
void exp_decay(std::span<const double> w, std::span<const double> z, double dt, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_value(std::span<const double> x);
double min_value(std::span<const double> x);
double max_abs(std::span<const double> x);
double max_face_gradient(const Grid& g, std::span<const double> x);
}  // namespace omp

/// Shared pointwise face laws so both backends produce the same face values.
inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace dcsim::kernels
