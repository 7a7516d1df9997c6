#pragma once

#include <string>
#include <vector>

#include "noisypower/matrix.hpp"
#include "noisypower/power.hpp"

namespace noisypower {

// Shortest round-trip decimal form, 17 significant digits ("%.17g").
std::string format_double(double v);

// Matrix files: first line `d` (square) or `m n`, then one whitespace-
// separated row per line. Loaders throw InvalidArgument on malformed input;
// load_symmetric additionally validates symmetry.
DenseMatrix load_dense(const std::string& path);
SymmetricMatrix load_symmetric(const std::string& path);
void save_dense(const std::string& path, const DenseMatrix& m);
void save_symmetric(const std::string& path, const SymmetricMatrix& m);

// Stream files: one whitespace-separated d-vector per line.
std::vector<std::vector<double>> load_vectors(const std::string& path);
void save_vectors(const std::string& path,
                  const std::vector<std::vector<double>>& rows);

// CSV schema: iter,tan_theta,cos_theta,residual,noise_norm,noise_proj_norm,
// x_inf_norm; one row per iteration. Output is deterministic byte-for-byte
// for a given trace.
void write_trace_csv(const std::string& path, const ConvergenceTrace& trace);

}  // namespace noisypower
