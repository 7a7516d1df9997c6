#include "noisypower/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "noisypower/errors.hpp"

namespace noisypower {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write file: " + path);
  return out;
}

}  // namespace

DenseMatrix load_dense(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string header;
  if (!std::getline(in, header))
    throw InvalidArgument("matrix file is empty: " + path);
  std::istringstream hs(header);
  std::size_t m = 0, n = 0;
  if (!(hs >> m)) throw InvalidArgument("matrix header is malformed: " + path);
  if (!(hs >> n)) n = m;
  std::string extra;
  if (hs >> extra)
    throw InvalidArgument("matrix header is malformed: " + path);
  if (m < 1 || n < 1)
    throw InvalidArgument("matrix dimensions must be positive: " + path);

  DenseMatrix out(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> out(i, j)))
        throw InvalidArgument("matrix file has too few entries: " + path);
  return out;
}

SymmetricMatrix load_symmetric(const std::string& path) {
  const DenseMatrix m = load_dense(path);
  if (m.rows() != m.cols())
    throw InvalidArgument("symmetric matrix file must be square: " + path);
  return SymmetricMatrix::from_dense(m);
}

void save_dense(const std::string& path, const DenseMatrix& m) {
  std::ofstream out = open_output(path);
  if (m.rows() == m.cols()) {
    out << m.rows() << "\n";
  } else {
    out << m.rows() << " " << m.cols() << "\n";
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << " ";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

void save_symmetric(const std::string& path, const SymmetricMatrix& m) {
  save_dense(path, m.to_dense());
}

std::vector<std::vector<double>> load_vectors(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.empty()) continue;  // blank lines tolerated
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("stream file rows have mixed dimensions: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw InvalidArgument("stream file has no samples: " + path);
  return rows;
}

void save_vectors(const std::string& path,
                  const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_output(path);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << " ";
      out << format_double(row[j]);
    }
    out << "\n";
  }
}

void write_trace_csv(const std::string& path, const ConvergenceTrace& trace) {
  std::ofstream out = open_output(path);
  out << "iter,tan_theta,cos_theta,residual,noise_norm,noise_proj_norm,"
         "x_inf_norm\n";
  for (const TraceRow& row : trace.rows) {
    out << row.iter << "," << format_double(row.tan_theta) << ","
        << format_double(row.cos_theta) << "," << format_double(row.residual)
        << "," << format_double(row.noise_norm) << ","
        << format_double(row.noise_proj_norm) << ","
        << format_double(row.x_inf_norm) << "\n";
  }
}

}  // namespace noisypower
