#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "csimrec/rng.hpp"
#include "csimrec/solver1d.hpp"
#include "csimrec/solver2d.hpp"

namespace csimrec {

// Optional replacements for solver defaults. Fields that do not apply to a
// solver are ignored by it (kernel_side for 1D, for instance).
struct SolverOverrides {
  std::optional<double> sigma, mu, zeta, rho, k0, alpha_min, lambda, tol;
  std::optional<int> max_iter, kernel_side;
  std::optional<InterpKernel> kernel;

  SolverConfig1D apply(SolverConfig1D cfg) const;
  SolverConfig2D apply(SolverConfig2D cfg) const;
};

struct NamedImage {
  std::string id;
  Eigen::MatrixXd pixels;
};

struct ExperimentSpec {
  std::vector<std::filesystem::path> images;
  int patch_size = 8;
  int num_patches = 50;
  int dictionary_atoms = 128;
  std::vector<double> sampling_rates;
  std::uint64_t seed = 0;
  SolverOverrides overrides;
  int threads = 1;  // patch-level workers; results do not depend on it
  bool center_patches = true;  // SolverConfig1D::center for the patch runs

  void validate() const;
};

struct ResultRow {
  std::string image;
  double sr = 0.0;
  std::uint64_t seed = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double csim = 0.0;
  double seconds = 0.0;
};

// m = round(sr*n) distinct indices, uniform without replacement.
// Throws ParameterError if sr is outside (0, 1) or m rounds to 0.
SamplingMask1D random_mask(int n, double sr, Rng& rng);

// Same draw over the row-major pixel index of a rows x cols grid.
Mask2D random_mask_2d(int rows, int cols, double sr, Rng& rng);

// Non-overlapping tiles in row-major tile order, each flattened row-major.
// Partial tiles at the right and bottom edges are dropped.
std::vector<Eigen::VectorXd> extract_patches(const Eigen::MatrixXd& image,
                                             int patch_size);
// Inverse of extract_patches for images whose sides are multiples of
// patch_size.
Eigen::MatrixXd assemble_patches(const std::vector<Eigen::VectorXd>& patches,
                                 int rows, int cols, int patch_size);

// Loads every .pgm in a directory (sorted by name), or the file itself.
std::vector<NamedImage> load_images(const std::vector<std::filesystem::path>& paths);

// Patch benchmark: per image a fixed random set of tiles, then for every
// sampling rate a random mask per tile, 1D recovery, and mean PSNR / SSIM /
// CSIM against the original tiles.
std::vector<ResultRow> run_patch_benchmark(const std::vector<NamedImage>& images,
                                           const ExperimentSpec& spec);
std::vector<ResultRow> run_patch_benchmark(const ExperimentSpec& spec);

// Whole-image benchmark: per image and sampling rate, one random mask and a
// 2D inpainting run.
std::vector<ResultRow> run_inpaint_benchmark(const std::vector<NamedImage>& images,
                                             const ExperimentSpec& spec);
std::vector<ResultRow> run_inpaint_benchmark(const ExperimentSpec& spec);

inline constexpr const char* kCsvHeader = "image,sr,seed,psnr_db,ssim,csim,seconds";

// Writes kCsvHeader and one line per row. With timing = false the seconds
// column is written as 0 so that repeated runs are byte-identical.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows,
               bool timing = true);

// Shortest round-trip decimal form; infinity is written as "inf".
std::string format_number(double v);

// Thread count from CSIMREC_THREADS, default 1.
int default_thread_count();

}  // namespace csimrec
