#pragma once

#include <cstdint>
#include <vector>

#include "escape/dynsys.hpp"
#include "escape/holes.hpp"

namespace escape {

enum class BuildMode { exact, sampled };
enum class CellRule { interior, majority };

struct Csr {
  int n = 0;
  std::vector<std::int64_t> ptr;
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  Csr transpose() const;
};

// Grid discretization on k x k boxes; cell id = iy * k + ix.
struct UlamOperator {
  int k = 0;
  BuildMode mode = BuildMode::exact;
  int samples_per_box = 0;
  Csr P;                     // P[i][j] = area(B_i ∩ f^-1 B_j) / area(B_i)
  std::vector<char> masked;  // empty while unmasked

  int cells() const { return k * k; }
  bool is_masked() const { return !masked.empty(); }
  int masked_count() const;
  double row_sum(int i) const;
  Polygon cell_polygon(int id) const;
};

UlamOperator build(const Map& f, int k, BuildMode mode = BuildMode::exact, int samples_per_box = 8,
                   std::size_t max_nnz = 80'000'000);

// Cells counted as inside H under the rule.
std::vector<char> hole_cells(int k, const Hole& h, CellRule rule);
UlamOperator mask(const UlamOperator& op, const Hole& h, CellRule rule = CellRule::interior);
UlamOperator mask_cells(const UlamOperator& op, const std::vector<char>& cells);

struct SpectralResult {
  double r_lead = 0.0;
  std::vector<double> qsd;  // left eigenvector, L1-normalized
  double gap_proxy = 0.0;
  int iterations = 0;
  double residual = 0.0;  // ||qsd P - r qsd||_1
  bool converged = false;
  bool blockwise = false;  // restarted on one strongly connected block
};

struct LeadingOptions {
  double tol = 1e-12;       // eigenvalue change per iteration
  int stable_iters = 10;
  double residual_tol = 1e-10;
  int max_iter = 100000;
  int shift_after = 3000;   // iterations before switching to P + I/2
  const std::vector<double>* initial = nullptr;  // warm start
  bool throw_on_failure = true;
};

SpectralResult leading(const UlamOperator& op, const LeadingOptions& opt = {});
double qsd_residual(const UlamOperator& op, const SpectralResult& sr);

// log r, or -inf when r = 0.
double escape_rate(const SpectralResult& sr);

}  // namespace escape
