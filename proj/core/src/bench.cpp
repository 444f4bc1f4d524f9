#include "csimrec/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "csimrec/errors.hpp"
#include "csimrec/image_io.hpp"
#include "csimrec/metrics.hpp"
#include "csimrec/transforms.hpp"

namespace csimrec {

namespace {

template <typename Config>
void apply_common(const SolverOverrides& o, Config& cfg) {
  if (o.sigma) cfg.sigma = *o.sigma;
  if (o.mu) cfg.mu = *o.mu;
  if (o.zeta) cfg.zeta = *o.zeta;
  if (o.rho) cfg.rho = *o.rho;
  if (o.k0) cfg.k0 = *o.k0;
  if (o.alpha_min) cfg.alpha_min = *o.alpha_min;
  if (o.tol) cfg.tol = *o.tol;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
}

int observed_count(int n, double sr) {
  if (!(sr > 0.0 && sr < 1.0)) {
    throw ParameterError("sampling rate must be in (0, 1)");
  }
  const auto m = static_cast<int>(std::lround(sr * n));
  if (m == 0) throw ParameterError("sampling rate rounds to zero observed samples");
  return m;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += threads) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SolverConfig1D SolverOverrides::apply(SolverConfig1D cfg) const {
  apply_common(*this, cfg);
  if (lambda) cfg.lambda = *lambda;
  return cfg;
}

SolverConfig2D SolverOverrides::apply(SolverConfig2D cfg) const {
  apply_common(*this, cfg);
  if (lambda) cfg.lambda = *lambda;
  if (kernel_side) cfg.kernel_side = *kernel_side;
  if (kernel) cfg.kernel = *kernel;
  return cfg;
}

void ExperimentSpec::validate() const {
  if (patch_size < 2) throw ParameterError("patch_size must be >= 2");
  if (num_patches < 1) throw ParameterError("num_patches must be >= 1");
  if (dictionary_atoms < patch_size * patch_size) {
    throw ParameterError("dictionary_atoms must be >= patch_size^2");
  }
  if (sampling_rates.empty()) throw ParameterError("no sampling rates given");
  for (double sr : sampling_rates) {
    if (!(sr > 0.0 && sr < 1.0)) {
      throw ParameterError("sampling rates must lie in (0, 1)");
    }
  }
  if (threads < 1) throw ParameterError("threads must be >= 1");
}

SamplingMask1D random_mask(int n, double sr, Rng& rng) {
  const int m = observed_count(n, sr);
  return SamplingMask1D(n, rng.sample_without_replacement(n, m));
}

Mask2D random_mask_2d(int rows, int cols, double sr, Rng& rng) {
  if (rows < 1 || cols < 1) throw ParameterError("random_mask_2d: empty grid");
  const int n = rows * cols;
  const int m = observed_count(n, sr);
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(rows, cols);
  for (int idx : rng.sample_without_replacement(n, m)) grid(idx / cols, idx % cols) = 1.0;
  return Mask2D(std::move(grid));
}

std::vector<Eigen::VectorXd> extract_patches(const Eigen::MatrixXd& image,
                                             int patch_size) {
  if (patch_size < 1) throw ParameterError("extract_patches: patch_size must be >= 1");
  if (image.rows() < patch_size || image.cols() < patch_size) {
    throw ShapeError("extract_patches: image is smaller than one patch");
  }
  const Eigen::Index tiles_down = image.rows() / patch_size;
  const Eigen::Index tiles_across = image.cols() / patch_size;
  std::vector<Eigen::VectorXd> patches;
  patches.reserve(static_cast<std::size_t>(tiles_down * tiles_across));
  for (Eigen::Index tr = 0; tr < tiles_down; ++tr) {
    for (Eigen::Index tc = 0; tc < tiles_across; ++tc) {
      Eigen::VectorXd v(patch_size * patch_size);
      for (int r = 0; r < patch_size; ++r) {
        for (int c = 0; c < patch_size; ++c) {
          v(r * patch_size + c) = image(tr * patch_size + r, tc * patch_size + c);
        }
      }
      patches.push_back(std::move(v));
    }
  }
  return patches;
}

Eigen::MatrixXd assemble_patches(const std::vector<Eigen::VectorXd>& patches,
                                 int rows, int cols, int patch_size) {
  if (patch_size < 1 || rows % patch_size != 0 || cols % patch_size != 0) {
    throw ShapeError("assemble_patches: image sides must be multiples of patch_size");
  }
  const int across = cols / patch_size;
  if (static_cast<int>(patches.size()) != (rows / patch_size) * across) {
    throw ShapeError("assemble_patches: wrong number of patches");
  }
  Eigen::MatrixXd image(rows, cols);
  for (std::size_t k = 0; k < patches.size(); ++k) {
    if (patches[k].size() != patch_size * patch_size) {
      throw ShapeError("assemble_patches: wrong patch length");
    }
    const int tr = static_cast<int>(k) / across;
    const int tc = static_cast<int>(k) % across;
    for (int r = 0; r < patch_size; ++r) {
      for (int c = 0; c < patch_size; ++c) {
        image(tr * patch_size + r, tc * patch_size + c) = patches[k](r * patch_size + c);
      }
    }
  }
  return image;
}

std::vector<NamedImage> load_images(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : paths) {
    std::error_code ec;
    if (std::filesystem::is_directory(p, ec)) {
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw IoError("no .pgm files in " + p.string());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  if (files.empty()) throw IoError("no input images given");
  std::vector<NamedImage> images;
  for (const auto& f : files) {
    images.push_back({f.stem().string(), read_pgm(f).pixels});
  }
  return images;
}

std::vector<ResultRow> run_patch_benchmark(const std::vector<NamedImage>& images,
                                           const ExperimentSpec& spec) {
  spec.validate();
  const int n = spec.patch_size * spec.patch_size;
  const Dictionary dict = build_overcomplete_dct(n, spec.dictionary_atoms);
  std::vector<ResultRow> rows;

  for (std::size_t img = 0; img < images.size(); ++img) {
    const auto tiles = extract_patches(images[img].pixels, spec.patch_size);
    const int count = std::min<int>(spec.num_patches, static_cast<int>(tiles.size()));
    Rng pick(derive_seed(spec.seed, {img, 0}));
    const std::vector<int> chosen =
        pick.sample_without_replacement(static_cast<int>(tiles.size()), count);

    for (std::size_t k = 0; k < spec.sampling_rates.size(); ++k) {
      const double sr = spec.sampling_rates[k];
      SolverConfig1D cfg = spec.overrides.apply(SolverConfig1D::defaults_for(sr));
      cfg.center = spec.center_patches;
      cfg.validate();
      const CsimParams csim = csim_weights(n, cfg.resolved_k0(n), cfg.rho);

      std::vector<double> psnr_v(static_cast<std::size_t>(count));
      std::vector<double> ssim_v(psnr_v.size());
      std::vector<double> csim_v(psnr_v.size());
      const auto start = std::chrono::steady_clock::now();
      parallel_for(count, spec.threads, [&](int i) {
        const Eigen::VectorXd& truth = tiles[static_cast<std::size_t>(chosen[i])];
        Rng rng(derive_seed(spec.seed, {img, k + 1, static_cast<std::uint64_t>(i)}));
        const SamplingMask1D mask = random_mask(n, sr, rng);
        const PatchResult result = recover_patch(mask.gather(truth), mask, dict, cfg);
        const auto slot = static_cast<std::size_t>(i);
        psnr_v[slot] = psnr(result.x_hat, truth);
        ssim_v[slot] = ssim_global(result.x_hat, truth, kSsimC1, kSsimC2);
        csim_v[slot] = csim_quad(result.x_hat, truth, csim);
      });

      ResultRow row;
      row.image = images[img].id;
      row.sr = sr;
      row.seed = spec.seed;
      row.seconds = seconds_since(start);
      for (int i = 0; i < count; ++i) {
        const auto slot = static_cast<std::size_t>(i);
        row.psnr_db += psnr_v[slot];
        row.ssim += ssim_v[slot];
        row.csim += csim_v[slot];
      }
      row.psnr_db /= count;
      row.ssim /= count;
      row.csim /= count;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ResultRow> run_patch_benchmark(const ExperimentSpec& spec) {
  return run_patch_benchmark(load_images(spec.images), spec);
}

std::vector<ResultRow> run_inpaint_benchmark(const std::vector<NamedImage>& images,
                                             const ExperimentSpec& spec) {
  if (spec.sampling_rates.empty()) throw ParameterError("no sampling rates given");
  std::vector<ResultRow> rows;
  for (std::size_t img = 0; img < images.size(); ++img) {
    const Eigen::MatrixXd& truth = images[img].pixels;
    const int pixels = static_cast<int>(truth.size());
    for (std::size_t k = 0; k < spec.sampling_rates.size(); ++k) {
      const double sr = spec.sampling_rates[k];
      const SolverConfig2D cfg = spec.overrides.apply(SolverConfig2D::defaults_for(sr));
      cfg.validate();
      Rng rng(derive_seed(spec.seed, {img, k}));
      const Mask2D mask = random_mask_2d(static_cast<int>(truth.rows()),
                                         static_cast<int>(truth.cols()), sr, rng);
      const auto start = std::chrono::steady_clock::now();
      const InpaintResult result = inpaint(mask.apply(truth), mask, cfg);
      const double elapsed = seconds_since(start);
      const QualityReport q = compare_images(
          result.x_hat, truth, csim_weights(pixels, cfg.resolved_k0(pixels), cfg.rho));
      rows.push_back({images[img].id, sr, spec.seed, q.psnr, q.ssim, q.csim, elapsed});
    }
  }
  return rows;
}

std::vector<ResultRow> run_inpaint_benchmark(const ExperimentSpec& spec) {
  return run_inpaint_benchmark(load_images(spec.images), spec);
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timing) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.image << ',' << format_number(r.sr) << ',' << r.seed << ','
        << format_number(r.psnr_db) << ',' << format_number(r.ssim) << ','
        << format_number(r.csim) << ',' << (timing ? format_number(r.seconds) : "0")
        << '\n';
  }
}

int default_thread_count() {
  if (const char* env = std::getenv("CSIMREC_THREADS")) {
    int value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto res = std::from_chars(env, end, value);
    if (res.ec == std::errc() && res.ptr == end && value >= 1) return value;
  }
  return 1;
}

}  // namespace csimrec
