// Copyright 2026 The Dynasplat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsplat/core/check.hpp"
#include "dsplat/core/color.hpp"
#include "dsplat/edit/editor.hpp"
#include "dsplat/edit/region.hpp"
#include "dsplat/edit/remote.hpp"
#include "dsplat/io/dataset.hpp"
#include "dsplat/io/image_io.hpp"
#include "dsplat/io/metrics.hpp"
#include "dsplat/io/splat_file.hpp"
#include "dsplat/optim/backward.hpp"
#include "dsplat/optim/gradcheck.hpp"
#include "dsplat/optim/train.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/binding.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dsplat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRefusal = 3;

std::atomic<bool> g_stop{false};

void handle_sigint(int) { g_stop.store(true); }

// Every run echoes its resolved configuration for auditability.
void write_resolved_config(const std::string& out_dir, const json& config) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  std::ofstream out(fs::path(out_dir) / "resolved_config.json", std::ios::trunc);
  out << config.dump(2) << "\n";
}

std::vector<LabelInfo> default_labels() {
  return {{1, "hair"}, {2, "face"}, {3, "neck"}};
}

struct ServiceFlags {
  bool mock_editor = false;
  std::string editor_url;
  bool mock_refiner = false;
  std::string refiner_url;
  std::string cache_dir;
};

int cmd_synth(int seed, const std::string& out, int cameras, int frames,
              int resolution, int splats, double amplitude) {
  SyntheticConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.n_cameras = cameras;
  cfg.n_frames = frames;
  cfg.resolution = resolution;
  cfg.n_splats = splats;
  cfg.deform_amplitude = amplitude;
  json resolved = {{"command", "synth"},       {"seed", seed},
                   {"out", out},               {"cameras", cameras},
                   {"frames", frames},         {"resolution", resolution},
                   {"splats", splats},         {"deform_amplitude", amplitude}};
  write_resolved_config(out, resolved);
  const SyntheticResult result = generate_synthetic_scene(out, cfg);
  std::cout << "dataset written: " << result.manifest_path << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& data, const std::string& out, std::int64_t iters,
            int seed, int holdout, double lambda_rgb, double lambda_track,
            double lambda_rec, int densify_interval, std::size_t max_splats,
            double lr_start, double lr_end) {
  const Dataset dataset = load_dataset(data);
  FitConfig cfg;
  cfg.iterations = iters;
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.weights.lambda_rgb = lambda_rgb;
  cfg.weights.lambda_track = lambda_track;
  cfg.weights.lambda_rec = lambda_rec;
  cfg.densify.interval = densify_interval;
  cfg.max_splats = max_splats;
  cfg.schedule = LrSchedule{lr_start, lr_end, std::max<std::int64_t>(1, iters)};
  cfg.holdout_camera = holdout;
  cfg.out_dir = out;
  cfg.stop_requested = &g_stop;

  json resolved = {{"command", "fit"},
                   {"data", data},
                   {"out", out},
                   {"iterations", iters},
                   {"seed", seed},
                   {"holdout_camera", holdout},
                   {"lambda_rgb", lambda_rgb},
                   {"lambda_track", lambda_track},
                   {"lambda_rec", lambda_rec},
                   {"densify_interval", densify_interval},
                   {"max_splats", max_splats},
                   {"lr_start", lr_start},
                   {"lr_end", lr_end}};
  write_resolved_config(out, resolved);

  const FitResult result = fit_modeling_stage(dataset, cfg);
  std::cout << "fit finished after " << result.iterations_run
            << " iterations; checkpoint: " << result.checkpoint_path << "\n";
  return kExitOk;
}

int cmd_render(const std::string& checkpoint, const std::string& data,
               const std::string& out, std::vector<int> t_list,
               std::vector<int> p_list, bool all_nodes, bool labels_flag) {
  const Dataset dataset = load_dataset(data);
  const Scene scene = load_scene(checkpoint);
  fs::create_directories(out);

  std::vector<std::pair<int, int>> nodes;
  if (all_nodes) {
    for (int t = 0; t < dataset.n_frames(); ++t)
      for (int p = 0; p < dataset.n_cameras(); ++p) nodes.emplace_back(t, p);
  } else {
    if (t_list.empty() || p_list.empty()) {
      std::cerr << "render: provide --t and --p (or --all)\n";
      return kExitConfig;
    }
    for (int t : t_list)
      for (int p : p_list) nodes.emplace_back(t, p);
  }
  for (const auto& [t, p] : nodes) {
    if (t < 0 || t >= dataset.n_frames() || p < 0 || p >= dataset.n_cameras()) {
      std::cerr << "render: node (t=" << t << ", p=" << p << ") out of range\n";
      return kExitConfig;
    }
  }

  RenderConfig rc;
  rc.keep_records = false;
  for (const auto& [t, p] : nodes) {
    const Scene posed = pose_splats(scene, dataset.frames[t]);
    const RenderOutput ro = render(posed, dataset.cameras[p], rc);
    char name[64];
    std::snprintf(name, sizeof(name), "render_t%04d_c%02d.png", t, p);
    write_png((fs::path(out) / name).string(), ro.color);
    if (labels_flag) {
      std::snprintf(name, sizeof(name), "labels_t%04d_c%02d.png", t, p);
      write_label_png((fs::path(out) / name).string(), ro.labels);
    }
  }
  std::cout << "rendered " << nodes.size() << " views into " << out << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& data,
             const std::string& out_csv, int holdout) {
  const Dataset dataset = load_dataset(data);
  const Scene scene = load_scene(checkpoint);

  std::ofstream csv(out_csv, std::ios::trunc);
  DS_CHECK(csv.good(), Io, "cannot open metrics file: " + out_csv);
  csv << "t,p,psnr,ssim,lpips\n";
  RenderConfig rc;
  rc.keep_records = false;
  double sum_psnr = 0.0, sum_ssim = 0.0;
  std::size_t count = 0;
  for (int t = 0; t < dataset.n_frames(); ++t) {
    const Scene posed = pose_splats(scene, dataset.frames[t]);
    for (int p = 0; p < dataset.n_cameras(); ++p) {
      if (holdout >= 0 && p != holdout) continue;
      const RenderOutput ro = render(posed, dataset.cameras[p], rc);
      const Image3 target = dataset.image(t, p);
      const Metrics m = compute_metrics(target, quantize_image(ro.color));
      // LPIPS needs a configured perceptual plugin; reported absent.
      csv << t << "," << p << "," << m.psnr << "," << m.ssim << ",na\n";
      sum_psnr += m.psnr;
      sum_ssim += m.ssim;
      ++count;
    }
  }
  DS_CHECK(count > 0, Config, "no views matched the eval selection");
  csv << "mean,," << sum_psnr / count << "," << sum_ssim / count << ",na\n";
  std::cout << "eval: mean psnr " << sum_psnr / count << " dB, mean ssim "
            << sum_ssim / count << " over " << count << " views -> " << out_csv
            << "\n";
  return kExitOk;
}

int cmd_edit(const std::string& checkpoint, const std::string& data,
             const std::string& out, const std::string& prompt,
             std::int64_t iters, int seed, double lambda_rgb,
             const ServiceFlags& services) {
  const Dataset dataset = load_dataset(data);
  Scene scene = load_scene(checkpoint);

  const std::vector<LabelInfo> labels = default_labels();
  MockRefiner mock_refiner;
  std::unique_ptr<RemoteRefiner> remote_refiner;
  const PromptRefiner* refiner = &mock_refiner;
  if (!services.refiner_url.empty()) {
    RemoteConfig rc;
    rc.base_url = services.refiner_url;
    rc.cache_dir = services.cache_dir;
    if (const char* token = std::getenv("SERVICE_TOKEN")) rc.auth_token = token;
    remote_refiner = std::make_unique<RemoteRefiner>(rc);
    refiner = remote_refiner.get();
  }

  MockEditor mock_editor;
  std::unique_ptr<RemoteEditor> remote_editor;
  const ImageEditor* editor = &mock_editor;
  if (!services.editor_url.empty()) {
    RemoteConfig rc;
    rc.base_url = services.editor_url;
    rc.cache_dir = services.cache_dir;
    if (const char* token = std::getenv("SERVICE_TOKEN")) rc.auth_token = token;
    remote_editor = std::make_unique<RemoteEditor>(rc);
    editor = remote_editor.get();
  }

  const auto [plan, refusal] = refiner->refine(prompt, labels);
  if (refusal) {
    std::cerr << "edit refused: " << refusal->reason << "\n";
    return kExitRefusal;
  }

  json resolved = {{"command", "edit"},     {"checkpoint", checkpoint},
                   {"data", data},          {"out", out},
                   {"prompt", prompt},      {"iterations", iters},
                   {"seed", seed},          {"lambda_rgb", lambda_rgb},
                   {"editor", editor->name()}, {"refiner", refiner->name()}};
  write_resolved_config(out, resolved);

  std::vector<SelectNode> nodes;
  for (int t = 0; t < dataset.n_frames(); ++t)
    for (int p = 0; p < dataset.n_cameras(); ++p)
      nodes.push_back(SelectNode{t, p, static_cast<double>(t),
                                 static_cast<double>(p)});

  // One instruction at a time, sequentially refined scene.
  for (std::size_t idx = 0; idx < plan->instructions.size(); ++idx) {
    const EditInstruction& ins = plan->instructions[idx];
    RegionResult region;
    try {
      region = plan_to_region(ins, scene, dataset.frames, dataset.cameras,
                              nodes, labels);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Refusal) {
        std::cerr << "edit refused: " << e.what() << "\n";
        return kExitRefusal;
      }
      throw;
    }

    // Render and edit every node.
    RenderConfig rc;
    rc.keep_records = false;
    std::vector<EditRequest> requests;
    std::vector<Image3> originals;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const Scene posed = pose_splats(scene, dataset.frames[nodes[n].frame]);
      const RenderOutput ro = render(posed, dataset.cameras[nodes[n].camera], rc);
      EditRequest req;
      req.image = ro.color;
      req.mask = Mask(region.grid.width(), region.grid.height());
      for (std::size_t i = 0; i < region.node_masks[n].values.size(); ++i)
        req.mask.data[i] = region.node_masks[n].values[i] >= 0.5f ? 1 : 0;
      req.instruction = to_string(ins.action) + std::string(" ") + ins.style;
      req.seed = static_cast<std::uint64_t>(seed) + n;
      originals.push_back(req.image);
      requests.push_back(std::move(req));
    }
    const std::vector<EditResponse> responses =
        edit_images_concurrently(requests, *editor, 4);
    for (const EditResponse& r : responses)
      DS_CHECK(r.ok, Service, "edit service failed: " + r.status);

    std::vector<EditNode> edit_nodes;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      EditNode en;
      en.frame = nodes[n].frame;
      en.camera = nodes[n].camera;
      en.target = responses[n].image;
      en.region = requests[n].mask;
      edit_nodes.push_back(std::move(en));
    }

    EditConfig cfg;
    cfg.iterations = iters;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.weights.lambda_rgb = lambda_rgb;
    cfg.schedule = LrSchedule{1e-3, 1e-5, std::max<std::int64_t>(1, iters)};
    cfg.out_dir = out;
    cfg.stop_requested = &g_stop;
    const EditResult result =
        fit_editing_stage(scene, dataset.frames.front(), dataset.frames,
                          dataset.cameras, region.selection, edit_nodes, cfg);
    scene = result.scene;

    // Before/after contact sheet for the first node.
    const Scene posed = pose_splats(scene, dataset.frames[edit_nodes[0].frame]);
    const RenderOutput after =
        render(posed, dataset.cameras[edit_nodes[0].camera], rc);
    Image3 sheet(originals[0].width * 3, originals[0].height);
    for (int y = 0; y < sheet.height; ++y) {
      for (int x = 0; x < originals[0].width; ++x) {
        sheet.set(x, y, originals[0].at(x, y));
        sheet.set(x + originals[0].width, y, edit_nodes[0].target.at(x, y));
        sheet.set(x + 2 * originals[0].width, y, after.color.at(x, y));
      }
    }
    char name[64];
    std::snprintf(name, sizeof(name), "contact_sheet_%02zu.png", idx);
    write_png((fs::path(out) / name).string(), sheet);
    for (std::size_t n = 0; n < edit_nodes.size(); ++n) {
      std::snprintf(name, sizeof(name), "mask_t%04d_c%02d.png",
                    edit_nodes[n].frame, edit_nodes[n].camera);
      write_mask_png((fs::path(out) / name).string(), edit_nodes[n].region);
    }
  }

  save_scene((fs::path(out) / "edited.dsplat").string(), scene);
  std::cout << "edit finished; scene: "
            << (fs::path(out) / "edited.dsplat").string() << "\n";
  return kExitOk;
}

// Gradient verification against central finite differences on random scenes.
int cmd_gradcheck(int seed, int scenes, int splats, const std::string& report) {
  GradCheckConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.scenes = scenes;
  cfg.splats = splats;
  const GradCheckReport result = run_gradcheck(cfg);
  std::cout << result.text;
  if (!report.empty()) {
    std::ofstream out(report, std::ios::trunc);
    out << result.text;
  }
  return result.pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);
  CLI::App app{"Dynamic mesh-bound Gaussian splatting avatar engine"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  int seed = 7;
  std::string out_dir;
  int cameras = 8, frames = 10, resolution = 64, splats = 240;
  double amplitude = 0.25;
  synth->add_option("--seed", seed);
  synth->add_option("--out", out_dir)->required();
  synth->add_option("--cameras", cameras);
  synth->add_option("--frames", frames);
  synth->add_option("--resolution", resolution);
  synth->add_option("--splats", splats);
  synth->add_option("--deform-amplitude", amplitude);

  // fit
  auto* fit = app.add_subcommand("fit", "run the modeling stage");
  std::string data, checkpoint;
  std::int64_t iters = 5000;
  int holdout = -1;
  double lambda_rgb = 0.9, lambda_track = 0.5, lambda_rec = 0.8;
  int densify_interval = 2048;
  std::size_t max_splats = 500;
  double lr_start = 1e-3, lr_end = 1e-5;
  fit->add_option("--data", data)->required();
  fit->add_option("--out", out_dir)->required();
  fit->add_option("--iters", iters);
  fit->add_option("--seed", seed);
  fit->add_option("--holdout-camera", holdout);
  fit->add_option("--lambda-rgb", lambda_rgb);
  fit->add_option("--lambda-track", lambda_track);
  fit->add_option("--lambda-rec", lambda_rec);
  fit->add_option("--densify-interval", densify_interval);
  fit->add_option("--max-splats", max_splats);
  fit->add_option("--lr-start", lr_start);
  fit->add_option("--lr-end", lr_end);

  // render
  auto* rnd = app.add_subcommand("render", "render views from a checkpoint");
  std::vector<int> t_list, p_list;
  bool all_nodes = false, labels_flag = false;
  rnd->add_option("--checkpoint", checkpoint)->required();
  rnd->add_option("--data", data)->required();
  rnd->add_option("--out", out_dir)->required();
  rnd->add_option("--t", t_list);
  rnd->add_option("--p", p_list);
  rnd->add_flag("--all", all_nodes);
  rnd->add_flag("--labels", labels_flag);

  // edit
  auto* edit = app.add_subcommand("edit", "prompt-driven edit of a checkpoint");
  std::string prompt;
  std::int64_t edit_iters = 800;
  double edit_lambda_rgb = 0.7;
  ServiceFlags services;
  edit->add_option("--checkpoint", checkpoint)->required();
  edit->add_option("--data", data)->required();
  edit->add_option("--out", out_dir)->required();
  edit->add_option("--prompt", prompt)->required();
  edit->add_option("--iters", edit_iters);
  edit->add_option("--seed", seed);
  edit->add_option("--lambda-rgb", edit_lambda_rgb);
  auto* mock_editor_flag = edit->add_flag("--mock-editor", services.mock_editor);
  auto* editor_url_opt = edit->add_option("--editor-url", services.editor_url)
                             ->envname("EDITOR_URL");
  edit->add_flag("--mock-refiner", services.mock_refiner);
  edit->add_option("--refiner-url", services.refiner_url)->envname("REFINER_URL");
  edit->add_option("--cache-dir", services.cache_dir);
  mock_editor_flag->excludes(editor_url_opt);

  // eval
  auto* eval = app.add_subcommand("eval", "psnr/ssim of a checkpoint vs dataset");
  std::string out_csv = "metrics.csv";
  int eval_holdout = -1;
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--data", data)->required();
  eval->add_option("--out", out_csv);
  eval->add_option("--camera", eval_holdout);

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "verify gradients vs finite differences");
  int gc_scenes = 100, gc_splats = 20;
  std::string gc_report;
  gc->add_option("--seed", seed);
  gc->add_option("--scenes", gc_scenes);
  gc->add_option("--splats", gc_splats);
  gc->add_option("--report", gc_report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth)
      return cmd_synth(seed, out_dir, cameras, frames, resolution, splats,
                       amplitude);
    if (*fit)
      return cmd_fit(data, out_dir, iters, seed, holdout, lambda_rgb,
                     lambda_track, lambda_rec, densify_interval, max_splats,
                     lr_start, lr_end);
    if (*rnd)
      return cmd_render(checkpoint, data, out_dir, t_list, p_list, all_nodes,
                        labels_flag);
    if (*edit)
      return cmd_edit(checkpoint, data, out_dir, prompt, edit_iters, seed,
                      edit_lambda_rgb, services);
    if (*eval) return cmd_eval(checkpoint, data, out_csv, eval_holdout);
    if (*gc) return cmd_gradcheck(seed, gc_scenes, gc_splats, gc_report);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Refusal) {
      std::cerr << "refused: " << e.what() << "\n";
      return kExitRefusal;
    }
    if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::InvalidParameter) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
