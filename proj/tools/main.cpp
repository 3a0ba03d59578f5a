// Command-line front end: scene synthesis, per-view depth, refinement,
// fusion, and evaluation over a flat workspace directory.
//
// Workspace layout (index is the view number):
//   cam_%04d.txt        camera file
//   image_%04d.pfm      intensity image
//   gt_depth_%04d.pfm   ground-truth depth (0 = invalid)
//   gt_boundary_%04d.pfm ground-truth boundary mask
//   gt_cloud.ply        ground-truth point cloud
//   depth_%04d.pfm      raw half-resolution depth estimate
//   refined_%04d.pfm    refined full-resolution depth
//   edge_%04d.pfm       refined edge map (half resolution)
//   trace_%04d.csv      refinement loss trace
//
// Exit codes: 0 success, 1 usage error, 2 data/processing error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "bimvs/bimodal.hpp"
#include "bimvs/discontinuity.hpp"
#include "bimvs/errors.hpp"
#include "bimvs/eval.hpp"
#include "bimvs/fusion.hpp"
#include "bimvs/io.hpp"
#include "bimvs/losses.hpp"
#include "bimvs/patchmatch.hpp"
#include "bimvs/refine.hpp"
#include "bimvs/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::string indexed(const std::string& dir, const std::string& prefix, int i,
                    const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%04d", i);
  return dir + "/" + prefix + buf + ext;
}

std::vector<bimvs::CalibratedView> load_views(const std::string& dir) {
  std::vector<bimvs::CalibratedView> views;
  for (int i = 0;; ++i) {
    const std::string cam_path = indexed(dir, "cam", i, ".txt");
    const std::string img_path = indexed(dir, "image", i, ".pfm");
    if (!fs::exists(cam_path) || !fs::exists(img_path)) break;
    views.push_back(bimvs::view_from_camera_file(bimvs::read_cam(cam_path),
                                                 bimvs::read_pfm(img_path)));
  }
  if (views.empty()) {
    throw bimvs::IoError("no cam/image pairs found in " + dir);
  }
  return views;
}

void print_report(
    const std::vector<std::pair<std::string, double>>& entries,
    const std::string& report_path) {
  const std::string text = bimvs::format_report(entries);
  std::cout << text;
  if (!report_path.empty()) bimvs::write_report(report_path, entries);
}

struct SynthArgs {
  std::string spec_path, out_dir;
  bool png = false;
};

void run_synth(const SynthArgs& a) {
  const bimvs::SceneSpec spec = bimvs::load_scene_spec(a.spec_path);
  const bimvs::SyntheticScene scene = bimvs::render_scene(spec);
  fs::create_directories(a.out_dir);
  for (int i = 0; i < static_cast<int>(scene.views.size()); ++i) {
    const auto& view = scene.views[i];
    bimvs::write_cam(indexed(a.out_dir, "cam", i, ".txt"),
                     bimvs::camera_file_from_view(view));
    bimvs::write_pfm(indexed(a.out_dir, "image", i, ".pfm"), view.image);
    bimvs::write_depth_pfm(indexed(a.out_dir, "gt_depth", i, ".pfm"),
                           scene.gt_depths[i]);
    bimvs::GridD boundary(view.image.height(), view.image.width());
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      boundary[k] = scene.gt_boundaries[i][k] ? 1.0 : 0.0;
    }
    bimvs::write_pfm(indexed(a.out_dir, "gt_boundary", i, ".pfm"), boundary);
    if (a.png) {
      bimvs::write_png_gray(indexed(a.out_dir, "image", i, ".png"),
                            view.image);
      bimvs::write_png_gray(indexed(a.out_dir, "gt_boundary", i, ".png"),
                            boundary);
    }
  }
  bimvs::write_ply(a.out_dir + "/gt_cloud.ply", scene.gt_cloud);
  std::cout << "wrote " << scene.views.size() << " views to " << a.out_dir
            << "\n";
}

struct DepthArgs {
  std::string dir;
  int ref = -1;   // -1 = every view
  bimvs::PatchMatchConfig config;
  int threads = 1;
};

void run_depth_one(const DepthArgs& a,
                   const std::vector<bimvs::CalibratedView>& views, int ref) {
  std::vector<bimvs::CalibratedView> sources;
  for (int i = 0; i < static_cast<int>(views.size()); ++i) {
    if (i != ref) sources.push_back(views[i]);
  }
  const bimvs::DepthMap depth =
      bimvs::run(views[ref], sources, a.config, a.threads);
  bimvs::write_depth_pfm(indexed(a.dir, "depth", ref, ".pfm"), depth);
}

void run_depth(const DepthArgs& a) {
  const auto views = load_views(a.dir);
  if (a.ref >= static_cast<int>(views.size())) {
    throw bimvs::InvalidParameter("reference view index out of range");
  }
  if (a.ref >= 0) {
    run_depth_one(a, views, a.ref);
  } else {
    for (int i = 0; i < static_cast<int>(views.size()); ++i) {
      run_depth_one(a, views, i);
    }
  }
}

struct RefineArgs {
  std::string dir;
  int ref = -1;
  bool supervised = false;
  bimvs::RefineConfig config;
  bimvs::LossWeights weights;
  int threads = 1;
};

void run_refine_one(const RefineArgs& a,
                    const std::vector<bimvs::CalibratedView>& views, int ref) {
  const bimvs::DepthMap coarse =
      bimvs::read_depth_pfm(indexed(a.dir, "depth", ref, ".pfm"));
  const bimvs::CalibratedView& view = views[ref];
  if (coarse.height() * 2 != view.intrinsics.height ||
      coarse.width() * 2 != view.intrinsics.width) {
    throw bimvs::DimensionMismatch(
        "depth map is not at half the image resolution");
  }
  // Guided 2x upsampling first; refinement runs at full resolution.
  const bimvs::DepthMap upsampled =
      bimvs::upsample_depth(coarse, view.image);
  const bimvs::RefineInit init = bimvs::init_parameters(
      upsampled, a.config, view.depth_min, view.depth_max);

  bimvs::RefineResult result;
  if (a.supervised) {
    const bimvs::GroundTruth gt =
        bimvs::read_depth_pfm(indexed(a.dir, "gt_depth", ref, ".pfm"));
    // The raw half-resolution estimate enters the multi-scale data term
    // as a constant.
    const bimvs::GroundTruth coarse_gt = bimvs::downsample_nn(gt, 2);
    result = bimvs::refine_supervised(init, gt, {&coarse}, {&coarse_gt},
                                      a.config, a.weights, view.depth_min,
                                      view.depth_max, a.threads);
  } else {
    std::vector<bimvs::CalibratedView> sources;
    for (int i = 0; i < static_cast<int>(views.size()); ++i) {
      if (i != ref) sources.push_back(views[i]);
    }
    result = bimvs::refine_self_supervised(init, view, sources, a.config,
                                           a.weights, a.threads);
  }

  bimvs::write_depth_pfm(indexed(a.dir, "refined", ref, ".pfm"), result.depth);
  bimvs::write_pfm(indexed(a.dir, "edge", ref, ".pfm"), result.edge.grid);
  bimvs::write_trace_csv(indexed(a.dir, "trace", ref, ".csv"), result.trace);
}

void run_refine(const RefineArgs& a) {
  const auto views = load_views(a.dir);
  if (a.ref >= static_cast<int>(views.size())) {
    throw bimvs::InvalidParameter("reference view index out of range");
  }
  if (a.ref >= 0) {
    run_refine_one(a, views, a.ref);
  } else {
    for (int i = 0; i < static_cast<int>(views.size()); ++i) {
      run_refine_one(a, views, i);
    }
  }
}

struct FuseArgs {
  std::string dir, out_ply;
  std::string depth_prefix = "refined";
  bimvs::FusionConfig config;
  int threads = 1;
};

void run_fuse(const FuseArgs& a) {
  const auto views = load_views(a.dir);
  std::vector<std::pair<bimvs::CalibratedView, bimvs::DepthMap>> inputs;
  for (int i = 0; i < static_cast<int>(views.size()); ++i) {
    bimvs::DepthMap depth =
        bimvs::read_depth_pfm(indexed(a.dir, a.depth_prefix, i, ".pfm"));
    inputs.emplace_back(views[i], std::move(depth));
  }
  const bimvs::PointCloud cloud = bimvs::fuse(inputs, a.config, a.threads);
  bimvs::write_ply(a.out_ply, cloud);
  std::cout << "fused " << cloud.size() << " points\n";
}

struct EvalCloudArgs {
  std::string recon_ply, ref_ply, report;
  double cap = bimvs::kDefaultOutlierCap;
  double threshold = 0;   // 0 = same as cap
};

void run_eval_cloud(const EvalCloudArgs& a) {
  const bimvs::PointCloud recon = bimvs::read_ply(a.recon_ply);
  const bimvs::PointCloud reference = bimvs::read_ply(a.ref_ply);
  const double threshold = a.threshold > 0 ? a.threshold : a.cap;
  const bimvs::CloudMetrics m =
      bimvs::evaluate_clouds(recon, reference, a.cap, threshold);
  print_report({{"accuracy", m.accuracy},
                {"completeness", m.completeness},
                {"overall", m.overall},
                {"precision_pct", m.precision_pct},
                {"recall_pct", m.recall_pct},
                {"fscore", m.fscore}},
               a.report);
}

struct EvalDepthArgs {
  std::string est_pfm, gt_pfm, report;
  double error_threshold = 0.008;
  double boundary_threshold = bimvs::kBoundaryLapThreshold;
};

void run_eval_depth(const EvalDepthArgs& a) {
  const bimvs::DepthMap est = bimvs::read_depth_pfm(a.est_pfm);
  const bimvs::GroundTruth gt = bimvs::read_depth_pfm(a.gt_pfm);
  const bimvs::DepthMetrics m = bimvs::depth_metrics(
      est, gt, a.error_threshold, a.boundary_threshold);
  print_report({{"mae", m.mae},
                {"error_ratio", m.error_ratio},
                {"boundary_mae", m.boundary_mae},
                {"smooth_mae", m.smooth_mae}},
               a.report);
}

struct LossesArgs {
  std::string est_pfm, gt_pfm, edge_pfm, report;
  double tau = 0;   // <= 0 derives 0.5% of the observed GT range
  double beta = bimvs::kDefaultBeta;
  bimvs::LossWeights weights;
};

void run_losses(const LossesArgs& a) {
  const bimvs::DepthMap est = bimvs::read_depth_pfm(a.est_pfm);
  const bimvs::GroundTruth gt = bimvs::read_depth_pfm(a.gt_pfm);
  bimvs::EdgeMap edge;
  if (!a.edge_pfm.empty()) {
    edge.grid = bimvs::read_pfm(a.edge_pfm);
  } else {
    edge = bimvs::EdgeMap(est.height(), est.width(), 0.0);
  }
  double tau = a.tau;
  if (tau <= 0) {
    double lo = 0, hi = 0;
    bool first = true;
    for (std::size_t i = 0; i < gt.depth.size(); ++i) {
      if (!gt.valid[i]) continue;
      lo = first ? gt.depth[i] : std::min(lo, gt.depth[i]);
      hi = first ? gt.depth[i] : std::max(hi, gt.depth[i]);
      first = false;
    }
    if (first) throw bimvs::NoValidPixels();
    tau = bimvs::default_tau(hi - lo);
    if (tau <= 0) tau = 1e-6;
  }
  bimvs::TotalLossInputs in;
  in.depth = &est;
  in.gt = &gt;
  in.edge = &edge;
  in.tau = tau;
  in.beta = a.beta;
  const bimvs::LossReport r = bimvs::total_loss(in, a.weights, false);
  print_report({{"l_gt", r.l_gt},
                {"l_ed", r.l_ed},
                {"l_sm", r.l_sm},
                {"l_bi", r.l_bi},
                {"l_total", r.l_total}},
               a.report);
}

void add_weight_options(CLI::App* cmd, bimvs::LossWeights* w) {
  cmd->add_option("--lambda1", w->lambda1, "Edge-map loss weight");
  cmd->add_option("--lambda2", w->lambda2, "Smoothness loss weight");
  cmd->add_option("--lambda3", w->lambda3, "Mixture NLL weight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view stereo with bimodal per-pixel depth"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Render a synthetic scene into a workspace");
  synth_cmd->add_option("--spec", synth.spec_path, "Scene description file")
      ->required();
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")
      ->required();
  synth_cmd->add_flag("--png", synth.png, "Also write PNG previews");

  DepthArgs depth;
  auto* depth_cmd =
      app.add_subcommand("depth", "PatchMatch depth for one or all views");
  depth_cmd->add_option("--in", depth.dir, "Workspace directory")->required();
  depth_cmd->add_option("--ref", depth.ref,
                        "Reference view index (default: all views)");
  depth_cmd->add_option("--levels", depth.config.levels, "Pyramid levels");
  depth_cmd->add_option("--iters", depth.config.iterations_per_level,
                        "Iterations per level");
  depth_cmd->add_option("--window", depth.config.window, "NCC window size");
  depth_cmd->add_option("--hyps", depth.config.hypotheses_per_pixel,
                        "Hypotheses per pixel");
  depth_cmd->add_option("--seed", depth.config.rng_seed, "RNG seed");
  depth_cmd->add_option("--threads", depth.threads, "Worker threads");

  RefineArgs refine;
  auto* refine_cmd =
      app.add_subcommand("refine", "Refine raw depth into mixture + edges");
  refine_cmd->add_option("--in", refine.dir, "Workspace directory")
      ->required();
  refine_cmd->add_option("--ref", refine.ref,
                         "Reference view index (default: all views)");
  refine_cmd->add_flag("--supervised", refine.supervised,
                       "Optimize against ground-truth depth");
  refine_cmd->add_option("--steps", refine.config.steps, "Descent steps");
  refine_cmd->add_option("--step-size", refine.config.step_size,
                         "Initial step size");
  refine_cmd->add_option("--tau", refine.config.tau,
                         "Boundary threshold (<= 0: 0.5% of depth range)");
  refine_cmd->add_option("--beta", refine.config.beta, "Smoothness sharpness");
  refine_cmd->add_option("--threads", refine.threads, "Worker threads");
  add_weight_options(refine_cmd, &refine.weights);

  FuseArgs fuse;
  auto* fuse_cmd =
      app.add_subcommand("fuse", "Fuse per-view depth maps into a point cloud");
  fuse_cmd->add_option("--in", fuse.dir, "Workspace directory")->required();
  fuse_cmd->add_option("--out", fuse.out_ply, "Output PLY path")->required();
  fuse_cmd->add_option("--depth-prefix", fuse.depth_prefix,
                       "Depth file prefix (refined, depth, gt_depth)");
  fuse_cmd->add_option("--min-views", fuse.config.min_consistent_views,
                       "Minimum consistent source views");
  fuse_cmd->add_option("--reproj-px", fuse.config.max_reproj_px,
                       "Reprojection tolerance in pixels");
  fuse_cmd->add_option("--rel-depth", fuse.config.max_rel_depth,
                       "Relative depth tolerance");
  fuse_cmd->add_option("--min-ncc", fuse.config.min_ncc,
                       "Photometric NCC gate");
  bool no_photo = false;
  fuse_cmd->add_flag("--no-photo", no_photo, "Disable the photometric gate");
  fuse_cmd->add_option("--threads", fuse.threads, "Worker threads");

  EvalCloudArgs eval_cloud;
  auto* eval_cloud_cmd =
      app.add_subcommand("eval-cloud", "Point-cloud benchmark metrics");
  eval_cloud_cmd
      ->add_option("--recon", eval_cloud.recon_ply, "Reconstructed PLY")
      ->required();
  eval_cloud_cmd->add_option("--ref", eval_cloud.ref_ply, "Reference PLY")
      ->required();
  eval_cloud_cmd->add_option("--cap", eval_cloud.cap,
                             "Outlier distance cap for accuracy metrics");
  eval_cloud_cmd->add_option("--threshold", eval_cloud.threshold,
                             "Precision/recall distance (default: cap)");
  eval_cloud_cmd->add_option("--report", eval_cloud.report,
                             "Also write the report to this file");

  EvalDepthArgs eval_depth;
  auto* eval_depth_cmd =
      app.add_subcommand("eval-depth", "Depth-map benchmark metrics");
  eval_depth_cmd->add_option("--est", eval_depth.est_pfm, "Estimated depth")
      ->required();
  eval_depth_cmd->add_option("--gt", eval_depth.gt_pfm, "Ground-truth depth")
      ->required();
  eval_depth_cmd->add_option("--error-threshold", eval_depth.error_threshold,
                             "Error-ratio threshold");
  eval_depth_cmd->add_option("--boundary-threshold",
                             eval_depth.boundary_threshold,
                             "Ground-truth Laplacian boundary threshold");
  eval_depth_cmd->add_option("--report", eval_depth.report,
                             "Also write the report to this file");

  LossesArgs losses;
  auto* losses_cmd =
      app.add_subcommand("losses", "Evaluate the training objective terms");
  losses_cmd->add_option("--est", losses.est_pfm, "Estimated depth PFM")
      ->required();
  losses_cmd->add_option("--gt", losses.gt_pfm, "Ground-truth depth PFM")
      ->required();
  losses_cmd->add_option("--edge", losses.edge_pfm, "Edge-map PFM (optional)");
  losses_cmd->add_option("--tau", losses.tau, "Boundary threshold");
  losses_cmd->add_option("--beta", losses.beta, "Smoothness sharpness");
  losses_cmd->add_option("--report", losses.report,
                         "Also write the report to this file");
  add_weight_options(losses_cmd, &losses.weights);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's per-error exit codes: 0 for --help, 1 for misuse.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*depth_cmd) {
      depth.config.validate();
      run_depth(depth);
    }
    if (*refine_cmd) {
      refine.config.validate();
      run_refine(refine);
    }
    if (*fuse_cmd) {
      fuse.config.use_photometric = !no_photo;
      fuse.config.validate();
      run_fuse(fuse);
    }
    if (*eval_cloud_cmd) run_eval_cloud(eval_cloud);
    if (*eval_depth_cmd) run_eval_depth(eval_depth);
    if (*losses_cmd) run_losses(losses);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
