#include "cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "csimrec/bench.hpp"
#include "csimrec/errors.hpp"
#include "csimrec/image_io.hpp"
#include "csimrec/metrics.hpp"
#include "csimrec/solver2d.hpp"

namespace csimrec::cli {

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raised for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_overrides(CLI::App& app, SolverOverrides& o) {
  app.add_option("--sigma", o.sigma, "augmented-Lagrangian penalty");
  app.add_option("--mu", o.mu, "threshold decay factor in (0,1)");
  app.add_option("--zeta", o.zeta, "initial threshold factor in (0,1)");
  app.add_option("--rho", o.rho, "CSIM error-sensitivity constant");
  app.add_option("--k0", o.k0, "CSIM scale constant");
  app.add_option("--alpha-min", o.alpha_min, "threshold floor");
  app.add_option("--max-iter", o.max_iter, "iteration cap");
  app.add_option("--tol", o.tol, "relative x-change stopping tolerance");
  app.add_option("--lambda", o.lambda, "operator-norm bound used by the s-step");
  app.add_option("--kernel-side", o.kernel_side, "residual interpolation kernel side (2D)");
  const std::map<std::string, InterpKernel> kernels{{"box", InterpKernel::kBox},
                                                    {"tent", InterpKernel::kTent}};
  app.add_option("--kernel", o.kernel, "residual interpolation kernel shape (2D)")
      ->transform(CLI::CheckedTransformer(kernels, CLI::ignore_case).description("{box,tent}"));
}

std::string describe(const QualityReport& q) {
  std::ostringstream os;
  os << "mse=" << format_number(q.mse) << " psnr_db=" << format_number(q.psnr)
     << " ssim=" << format_number(q.ssim) << " csim=" << format_number(q.csim);
  return os.str();
}

template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path + " for writing");
  fn(file);
  if (!file) throw IoError("error while writing " + path);
}

struct InpaintArgs {
  std::string in, mask, out, ref;
  std::optional<double> sr;
  std::uint64_t seed = 0;
  bool print_config = false;
  SolverOverrides overrides;
};

int run_inpaint(const InpaintArgs& a, std::ostream& out, std::ostream& err) {
  const GrayImage input = read_pgm(a.in);
  Mask2D mask;
  if (!a.mask.empty()) {
    mask = read_mask(a.mask);
    if (mask.rows() != input.height() || mask.cols() != input.width()) {
      throw ShapeError("mask size does not match the input image");
    }
  } else {
    if (!a.sr) throw UsageError("inpaint: either --mask or --sr is required");
    Rng rng(a.seed);
    mask = random_mask_2d(input.height(), input.width(), *a.sr, rng);
  }
  const double sr = a.sr ? *a.sr
                         : static_cast<double>(mask.count()) /
                               static_cast<double>(input.pixels.size());
  const SolverConfig2D cfg = a.overrides.apply(SolverConfig2D::defaults_for(sr));
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  if (a.print_config) out << "config " << cfg.describe() << '\n';

  const InpaintResult result = inpaint(mask.apply(input.pixels), mask, cfg);
  write_pgm(GrayImage{result.x_hat}, a.out);
  out << "iterations=" << result.report.iterations
      << " observed=" << mask.count() << '\n';
  if (!a.ref.empty()) {
    const GrayImage ref = read_pgm(a.ref);
    if (ref.pixels.rows() != result.x_hat.rows() || ref.pixels.cols() != result.x_hat.cols()) {
      throw ShapeError("reference image size does not match the input image");
    }
    const int pixels = static_cast<int>(ref.pixels.size());
    // Quantize like the written file so the numbers describe what was saved.
    const GrayImage saved = parse_pgm(format_pgm(GrayImage{result.x_hat}));
    const QualityReport q = compare_images(
        saved.pixels, ref.pixels, csim_weights(pixels, cfg.resolved_k0(pixels), cfg.rho));
    out << describe(q) << '\n';
  }
  err << "inpaint: " << format_number(result.report.seconds) << " s\n";
  return 0;
}

struct MetricsArgs {
  std::string a, b;
  int window = kSsimWindow;
  std::optional<double> k0;
  double rho = 1.1;
};

int run_metrics(const MetricsArgs& m, std::ostream& out) {
  const GrayImage a = read_pgm(m.a);
  const GrayImage b = read_pgm(m.b);
  if (a.pixels.rows() != b.pixels.rows() || a.pixels.cols() != b.pixels.cols()) {
    throw ShapeError("metrics: images differ in size");
  }
  const int pixels = static_cast<int>(a.pixels.size());
  if (pixels < 2) throw ShapeError("metrics: images need at least two pixels");
  const CsimParams p = csim_weights(pixels, m.k0 ? *m.k0 : 2.5 * (pixels - 1.0), m.rho);
  QualityReport q;
  q.mse = mse(a.pixels, b.pixels);
  q.psnr = psnr(a.pixels, b.pixels);
  q.ssim = ssim_windowed(a.pixels, b.pixels, m.window, kSsimC1, kSsimC2);
  q.csim = csim_quad(a.pixels.reshaped(), b.pixels.reshaped(), p);
  const double global =
      ssim_global(a.pixels.reshaped(), b.pixels.reshaped(), kSsimC1, kSsimC2);
  out << describe(q) << " ssim_global=" << format_number(global) << '\n';
  return 0;
}

struct MaskArgs {
  std::string out, like;
  int width = 0, height = 0;
  double sr = 0.0;
  std::uint64_t seed = 0;
};

int run_mask(const MaskArgs& m, std::ostream& out) {
  int width = m.width;
  int height = m.height;
  if (!m.like.empty()) {
    const GrayImage like = read_pgm(m.like);
    width = like.width();
    height = like.height();
  }
  if (width < 1 || height < 1) {
    throw UsageError("mask: give --like or both --width and --height");
  }
  Rng rng(m.seed);
  const Mask2D mask = random_mask_2d(height, width, m.sr, rng);
  write_mask(mask, m.out);
  out << "observed=" << mask.count() << " of " << width * height << '\n';
  return 0;
}

struct BenchArgs {
  std::vector<std::string> images;
  std::vector<double> rates;
  std::uint64_t seed = 0;
  int patches = 50;
  int patch_size = 8;
  int atoms = 128;
  int threads = 1;
  std::string out;
  bool no_timing = false;
  bool print_config = false;
  bool no_center = false;
  SolverOverrides overrides;

  ExperimentSpec spec() const {
    ExperimentSpec s;
    for (const auto& p : images) s.images.emplace_back(p);
    s.sampling_rates = rates;
    s.seed = seed;
    s.num_patches = patches;
    s.patch_size = patch_size;
    s.dictionary_atoms = atoms;
    s.threads = threads;
    s.overrides = overrides;
    s.center_patches = !no_center;
    return s;
  }
};

SolverConfig1D patch_config(const ExperimentSpec& spec, double sr) {
  SolverConfig1D cfg = spec.overrides.apply(SolverConfig1D::defaults_for(sr));
  cfg.center = spec.center_patches;
  return cfg;
}

int run_bench(const BenchArgs& b, bool patch, std::ostream& out) {
  const ExperimentSpec spec = b.spec();
  try {
    spec.validate();
    for (double sr : spec.sampling_rates) {
      if (patch) {
        patch_config(spec, sr).validate();
      } else {
        spec.overrides.apply(SolverConfig2D::defaults_for(sr)).validate();
      }
    }
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  if (b.print_config) {
    for (double sr : spec.sampling_rates) {
      out << "config sr=" << format_number(sr) << ' '
          << (patch ? patch_config(spec, sr).describe()
                    : spec.overrides.apply(SolverConfig2D::defaults_for(sr)).describe())
          << '\n';
    }
  }
  const auto rows = patch ? run_patch_benchmark(spec) : run_inpaint_benchmark(spec);
  with_output(b.out, out, [&](std::ostream& os) { write_csv(os, rows, !b.no_timing); });
  return 0;
}

void add_bench_options(CLI::App& app, BenchArgs& b) {
  app.add_option("--images", b.images, "PGM files or directories of PGM files")
      ->required();
  app.add_option("--sr", b.rates, "comma-separated sampling rates")->delimiter(',');
  app.add_option("--seed", b.seed, "RNG seed");
  app.add_option("--out", b.out, "CSV output path (default stdout)");
  app.add_flag("--no-timing", b.no_timing, "write 0 in the seconds column");
  app.add_flag("--print-config", b.print_config, "echo the effective solver config");
  add_overrides(app, b.overrides);
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Missing-sample recovery with a CSIM fidelity term and ADMM"};
  app.name(args.empty() ? "csimrec" : args.front());
  app.require_subcommand(1);

  InpaintArgs inpaint_args;
  auto* inpaint_cmd = app.add_subcommand("inpaint", "inpaint one image");
  inpaint_cmd->add_option("--in", inpaint_args.in, "input PGM")->required();
  inpaint_cmd->add_option("--mask", inpaint_args.mask, "mask PGM (255 = observed)");
  inpaint_cmd->add_option("--out", inpaint_args.out, "output PGM")->required();
  inpaint_cmd->add_option("--ref", inpaint_args.ref, "reference PGM for metrics");
  inpaint_cmd->add_option("--sr", inpaint_args.sr,
                          "sampling rate (random mask when --mask is absent)");
  inpaint_cmd->add_option("--seed", inpaint_args.seed, "RNG seed for the random mask");
  inpaint_cmd->add_flag("--print-config", inpaint_args.print_config,
                        "echo the effective solver config");
  add_overrides(*inpaint_cmd, inpaint_args.overrides);

  BenchArgs patch_args;
  patch_args.rates = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  auto* patch_cmd = app.add_subcommand("patchbench", "1D patch-recovery benchmark");
  add_bench_options(*patch_cmd, patch_args);
  patch_cmd->add_option("--patches", patch_args.patches, "patches per image");
  patch_cmd->add_option("--patch-size", patch_args.patch_size, "patch side length");
  patch_cmd->add_option("--atoms", patch_args.atoms, "dictionary atom count");
  patch_cmd->add_flag("--no-center", patch_args.no_center,
                      "do not remove the observed mean before recovery");
  patch_cmd->add_option("--threads", patch_args.threads, "worker threads")
      ->default_val(default_thread_count());

  BenchArgs image_args;
  image_args.rates = {0.1, 0.3, 0.5};
  auto* image_cmd = app.add_subcommand("imagebench", "2D inpainting benchmark");
  add_bench_options(*image_cmd, image_args);

  MetricsArgs metrics_args;
  auto* metrics_cmd = app.add_subcommand("metrics", "compare two images");
  metrics_cmd->add_option("--a", metrics_args.a, "first PGM")->required();
  metrics_cmd->add_option("--b", metrics_args.b, "second PGM")->required();
  metrics_cmd->add_option("--window", metrics_args.window, "SSIM window side");
  metrics_cmd->add_option("--k0", metrics_args.k0, "CSIM scale (default 2.5(N-1))");
  metrics_cmd->add_option("--rho", metrics_args.rho, "CSIM error sensitivity");

  MaskArgs mask_args;
  auto* mask_cmd = app.add_subcommand("mask", "generate a random sampling mask");
  mask_cmd->add_option("--out", mask_args.out, "output mask PGM")->required();
  mask_cmd->add_option("--sr", mask_args.sr, "sampling rate")->required();
  mask_cmd->add_option("--seed", mask_args.seed, "RNG seed");
  mask_cmd->add_option("--like", mask_args.like, "take the size from this PGM");
  mask_cmd->add_option("--width", mask_args.width, "mask width");
  mask_cmd->add_option("--height", mask_args.height, "mask height");

  std::vector<std::string> argv_rest(args.size() > 1 ? args.begin() + 1 : args.end(),
                                     args.end());
  std::reverse(argv_rest.begin(), argv_rest.end());
  try {
    app.parse(argv_rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (inpaint_cmd->parsed()) return run_inpaint(inpaint_args, out, err);
    if (patch_cmd->parsed()) return run_bench(patch_args, true, out);
    if (image_cmd->parsed()) return run_bench(image_args, false, out);
    if (metrics_cmd->parsed()) return run_metrics(metrics_args, out);
    if (mask_cmd->parsed()) return run_mask(mask_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace csimrec::cli
