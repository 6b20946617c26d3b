#include "tin/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "tin/errors.hpp"
#include "tin/evaluator.hpp"
#include "tin/inference.hpp"
#include "tin/io.hpp"
#include "tin/model.hpp"
#include "tin/nms.hpp"
#include "tin/synthetic.hpp"
#include "tin/trainer.hpp"

namespace tin {

namespace {

std::string grouped(Index n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

void print_summary(std::ostream& out, const NetworkGraph<float>& graph) {
  out << "variant " << variant_name(graph.variant()) << '\n';
  out << std::left << std::setw(16) << "layer" << std::setw(17) << "kind" << std::setw(22)
      << "input" << std::right << std::setw(5) << "in" << std::setw(5) << "out" << std::setw(4)
      << "k" << std::setw(4) << "d" << std::setw(9) << "params" << '\n';
  for (const LayerInfo& l : graph.layers()) {
    out << std::left << std::setw(16) << l.name << std::setw(17) << l.kind << std::setw(22)
        << l.input << std::right << std::setw(5) << l.in_channels << std::setw(5)
        << l.out_channels << std::setw(4) << l.kernel << std::setw(4) << l.dilation
        << std::setw(9) << l.params << '\n';
  }
  out << "total " << grouped(param_count(graph)) << '\n';
}

NetworkGraph<float> default_graph(Variant v) {
  return v == Variant::kTin1 ? build_tin1<float>() : build_tin2<float>();
}

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> scales;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v > 0.0)) {
      throw CLI::ValidationError("--scales", "expected positive numbers separated by commas");
    }
    scales.push_back(v);
  }
  if (scales.empty()) throw CLI::ValidationError("--scales", "no scales given");
  return scales;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Traditional-inspired edge detection network"};
  app.name("tin");
  app.require_subcommand(1);

  std::string manifest_path, variant_text = "tin1", out_path, config_path, log_path;
  auto* train_cmd = app.add_subcommand("train", "train a network on a manifest");
  train_cmd->add_option("--manifest", manifest_path, "image<TAB>label list")->required();
  train_cmd->add_option("--variant", variant_text, "tin1 or tin2")
      ->check(CLI::IsMember({"tin1", "tin2"}));
  train_cmd->add_option("--out", out_path, "checkpoint to write")->required();
  train_cmd->add_option("--config", config_path, "key=value overrides");
  train_cmd->add_option("--log", log_path, "per-epoch loss log");

  std::string ckpt_path, image_path, scales_text;
  bool use_nms = false;
  auto* infer_cmd = app.add_subcommand("infer", "predict an edge map");
  infer_cmd->add_option("--ckpt", ckpt_path, "trained checkpoint")->required();
  infer_cmd->add_option("--image", image_path, "8-bit PNG")->required();
  infer_cmd->add_option("--out", out_path, "edge map PNG to write")->required();
  infer_cmd->add_option("--scales", scales_text, "comma-separated, e.g. 0.5,1,1.5");
  infer_cmd->add_flag("--nms", use_nms, "thin the map");

  std::string pred_dir;
  double tolerance = 0.0075;
  auto* eval_cmd = app.add_subcommand("eval", "score predicted maps against labels");
  eval_cmd->add_option("--manifest", manifest_path, "image<TAB>label list")->required();
  eval_cmd->add_option("--pred-dir", pred_dir, "maps named <image stem>.png")->required();
  eval_cmd->add_option("--tolerance", tolerance, "fraction of the image diagonal")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--out", out_path, "report to write")->required();

  auto* summary_cmd = app.add_subcommand("summary", "print the layer table");
  auto* ckpt_opt = summary_cmd->add_option("--ckpt", ckpt_path);
  summary_cmd->add_option("--variant", variant_text)
      ->check(CLI::IsMember({"tin1", "tin2"}))
      ->excludes(ckpt_opt);

  int count = 8;
  std::uint64_t seed = 0;
  Index size = 96;
  auto* synth_cmd = app.add_subcommand("make-synthetic", "write the synthetic shapes dataset");
  synth_cmd->add_option("--out", out_path, "output directory")->required();
  synth_cmd->add_option("--count", count)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", seed)->capture_default_str();
  synth_cmd->add_option("--size", size)->capture_default_str()->check(CLI::Range(Index{16}, Index{4096}));

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      TrainConfig train_cfg;
      LossConfig loss_cfg;
      if (!config_path.empty()) load_config(config_path, train_cfg, loss_cfg);
      apply_env_overrides(train_cfg);
      const std::vector<Sample> data = load_dataset(load_manifest(manifest_path));
      NetworkGraph<float> graph = default_graph(parse_variant(variant_text));
      init_params(graph, train_cfg.seed);
      const CheckpointHook<float> hook = [&](int epoch, const NetworkGraph<float>& g) {
        save_checkpoint(g, out_path + ".epoch" + std::to_string(epoch));
      };
      const TrainingLog log = train(graph, data, train_cfg, loss_cfg, hook);
      save_checkpoint(graph, out_path);
      if (!log_path.empty()) {
        std::ofstream os(log_path);
        if (!os) throw DataError("cannot write '" + log_path + "'");
        write_log(os, log);
      }
      if (!log.epochs.empty()) {
        out << "epochs " << log.epochs.size() << " first_loss " << log.epochs.front().mean_loss
            << " last_loss " << log.epochs.back().mean_loss << '\n';
      }
    } else if (*infer_cmd) {
      const NetworkGraph<float> graph = load_checkpoint(ckpt_path);
      const Tensor<float> image = load_image(image_path);
      EdgeMap map = scales_text.empty() ? predict(graph, image)
                                        : predict_multiscale(graph, image, parse_scales(scales_text));
      if (use_nms) map = nms_thin(map);
      save_edge_map(out_path, map);
    } else if (*eval_cmd) {
      const Manifest manifest = load_manifest(manifest_path);
      const std::vector<double> thresholds = uniform_thresholds();
      std::vector<PRCurve> curves;
      for (const ManifestEntry& e : manifest.entries) {
        const GroundTruth gt = load_gt(e.gt);
        const fs::path pred = fs::path(pred_dir) / (e.image.stem().string() + ".png");
        curves.push_back(pr_sweep(load_edge_map(pred), gt, thresholds, tolerance));
      }
      const EvalReport report = ods_ois(std::move(curves), tolerance);
      std::ofstream os(out_path);
      if (!os) throw DataError("cannot write '" + out_path + "'");
      write_report(os, report);
      out << "ODS " << report.ods << " (t=" << report.ods_threshold << ") OIS " << report.ois
          << '\n';
    } else if (*summary_cmd) {
      if (!ckpt_path.empty()) {
        print_summary(out, load_checkpoint(ckpt_path));
      } else {
        print_summary(out, default_graph(parse_variant(variant_text)));
      }
    } else if (*synth_cmd) {
      SyntheticOptions opt;
      opt.size = size;
      write_synthetic(out_path, make_synthetic(count, seed, opt));
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ShapeError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace tin
