// Copyright 2026 The PGen Authors. All Rights Reserved.
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

// pgen: synthesize test sequences, encode/decode layered streams, extract
// substreams, measure quality, and run rate-distortion sweeps.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pgen/codec.h"
#include "pgen/container.h"
#include "pgen/errors.h"
#include "pgen/evaluation.h"
#include "pgen/keypoints.h"
#include "pgen/media.h"
#include "pgen/synthetic.h"

namespace {

using namespace pgen;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Codec options shared by encode and sweep.
struct CodecFlags {
  int qp = kDefaultQp;
  double qstep = kDefaultQstep;
  double tau = kDefaultTau;
  double background_weight = kDefaultBackgroundWeight;
  std::string layers = "all";
  std::vector<double> q_f = {1.0, 1.0, 1.0};
  int block = kDefaultBlock;
  int search = kDefaultSearch;
  std::optional<double> budget;

  void add(CLI::App* app, bool with_qp_and_layers) {
    if (with_qp_and_layers) {
      app->add_option("--qp", qp, "key-frame QP (2,12,22,32,42,52)")->capture_default_str();
      app->add_option("--layers", layers, "granularity levels, e.g. all, base, 8,16")
          ->capture_default_str();
      app->add_option("--budget", budget, "keep only the layers that fit this kbps budget");
    }
    app->add_option("--qstep", qstep, "keypoint quantizer step (normalized units)")
        ->capture_default_str();
    app->add_option("--tau", tau, "motion kernel bandwidth in pixels")->capture_default_str();
    app->add_option("--background-weight", background_weight, "background kernel weight")
        ->capture_default_str();
    app->add_option("--qf", q_f, "feature quantizer gain per level (8,16,32)")
        ->expected(3)
        ->delimiter(',');
    app->add_option("--block", block, "refinement block size")->capture_default_str();
    app->add_option("--search", search, "refinement search range")->capture_default_str();
  }

  CodecConfig config() const {
    CodecConfig c;
    c.key_qp = qp;
    c.qstep = qstep;
    c.tau = tau;
    c.background_weight = background_weight;
    c.layers = parse_layer_set(layers);
    for (int l = 0; l < kLevelCount; ++l) c.q_f[l] = q_f[l];
    c.block = block;
    c.search = search;
    c.budget_kbps = budget;
    return c;
  }
};

std::string config_tag(const CodecConfig& c) {
  std::ostringstream s;
  s << "qp=" << c.key_qp << ";qstep=" << c.qstep << ";tau=" << c.tau << ";qf=" << c.q_f[0]
    << "/" << c.q_f[1] << "/" << c.q_f[2] << ";block=" << c.block << ";search=" << c.search;
  return s.str();
}

void print_rates(const EncodeResult& r) {
  const LayerRates& rt = r.rates;
  std::printf("header      %8zu bytes\n", rt.header_bytes);
  std::printf("key frame   %8zu bytes\n", rt.key_bytes);
  std::printf("parameters  %8zu bytes  (%zu record bytes)\n", rt.param_bytes,
              rt.record_overhead_bytes);
  for (const GranularityLevel& g : kGranularityLevels) {
    if (r.layers.has(g.id)) {
      std::printf("level %-2d    %8zu bytes  (%dx%d)\n", g.id, rt.level_bytes[g.id], g.side,
                  g.side);
    }
  }
  LayerSet acc;
  std::printf("rate base          %10.3f kbps\n", rt.kbps_for(acc));
  for (const GranularityLevel& g : kGranularityLevels) {
    if (!r.layers.has(g.id)) continue;
    acc.level_mask |= 1u << g.id;
    std::printf("rate %-13s %10.3f kbps\n", to_string(acc).c_str(), rt.kbps_for(acc));
  }
  std::printf("total       %8zu bytes\n", r.bytes.size());
  if (!r.budget_fits) std::printf("warning: budget is below the base-layer rate\n");
}

int run_synth(int size, int width, int height, int frames, int fps, uint64_t seed,
              int keypoints, double amplitude, double tau, const std::string& out,
              const std::string& track_out) {
  SyntheticSpec spec;
  spec.width = width > 0 ? width : size;
  spec.height = height > 0 ? height : size;
  spec.frame_count = frames;
  spec.fps = fps;
  spec.seed = seed;
  spec.keypoint_count = keypoints;
  spec.motion_amplitude = amplitude;
  spec.kernel_bandwidth = tau;
  const SyntheticSequence s = generate_synthetic_sequence(spec);
  write_file(out, write_raw_video(s.video));
  write_file(track_out, write_track(s.track));
  std::printf("wrote %s (%d frames, %dx%d @ %d fps) and %s\n", out.c_str(), frames,
              spec.width, spec.height, fps, track_out.c_str());
  return 0;
}

struct SweepPoint {
  int qp;
  std::vector<ReportRow> rows;  // one per layer set
  std::vector<double> rates, psnrs, ssims;
  std::vector<uint8_t> stream;
};

int run_sweep(const std::string& input, const std::string& track_path,
              const std::string& qp_list, const std::string& layer_sets_arg,
              const CodecFlags& flags, double lambda, const std::string& csv_path,
              const std::string& rd_dir, const std::string& name_arg,
              const std::vector<std::string>& bd_pairs, const std::string& stream_dir,
              int jobs) {
  const VideoSequence video = read_raw_video(read_file(input));
  const KeypointTrack track = read_track(read_file(track_path));
  const std::string name =
      name_arg.empty() ? std::filesystem::path(input).stem().string() : name_arg;

  std::vector<int> qps;
  for (const std::string& q : split(qp_list, ',')) qps.push_back(std::stoi(q));
  if (qps.empty()) throw InvalidArgument("sweep: empty QP list");
  std::vector<LayerSet> sets;
  LayerSet all_levels;
  for (const std::string& s : split(layer_sets_arg, ';')) {
    sets.push_back(parse_layer_set(s));
    all_levels.level_mask |= sets.back().level_mask;
  }
  if (sets.empty()) throw InvalidArgument("sweep: no layer sets");

  CodecFlags base_flags = flags;
  base_flags.budget.reset();
  std::vector<SweepPoint> points(qps.size());
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(qps.size());
  auto worker = [&] {
    for (size_t i = next++; i < qps.size(); i = next++) {
      try {
        CodecConfig cfg = base_flags.config();
        cfg.key_qp = qps[i];
        cfg.layers = all_levels;
        const EncodeResult enc = encode_sequence(video, track, cfg);
        SweepPoint& p = points[i];
        p.qp = qps[i];
        p.stream = enc.bytes;
        for (const LayerSet& set : sets) {
          const std::vector<uint8_t> sub = extract_substream(enc.bytes, set);
          const DecodedSequence dec = decode_stream(sub);
          const double rate = bitrate_kbps(sub.size() * 8, static_cast<int>(video.frames.size()),
                                           video.fps);
          double mean_mse = 0;
          for (size_t f = 0; f < video.frames.size(); ++f) {
            mean_mse += mse(video.frames[f], dec.video.frames[f]);
          }
          mean_mse /= video.frames.size();
          const double q = psnr(video, dec.video);
          const double s = ssim(video, dec.video);
          p.rows.push_back({name, config_tag(cfg), to_string(set), rate, q, s,
                            rd_cost(mean_mse, rate, lambda)});
          p.rates.push_back(rate);
          p.psnrs.push_back(q);
          p.ssims.push_back(s);
        }
      } catch (const std::exception& e) {
        errors[i] = "QP " + std::to_string(qps[i]) + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(qps.size())));
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::string& e : errors) {
    if (!e.empty()) throw Error("sweep failed at " + e);
  }

  std::vector<ReportRow> rows;
  for (const SweepPoint& p : points) rows.insert(rows.end(), p.rows.begin(), p.rows.end());
  const std::string csv = emit_report(rows);
  write_file(csv_path, std::span(reinterpret_cast<const uint8_t*>(csv.data()), csv.size()));
  std::printf("wrote %s (%zu rows)\n", csv_path.c_str(), rows.size());

  if (!stream_dir.empty()) {
    std::filesystem::create_directories(stream_dir);
    for (const SweepPoint& p : points) {
      write_file(stream_dir + "/" + name + "_qp" + std::to_string(p.qp) + ".pgen", p.stream);
    }
  }

  // Curves per layer set, points sorted by rate.
  auto curve = [&](size_t set, const char* metric) {
    RDCurve c;
    c.metric = metric;
    for (const SweepPoint& p : points) {
      c.points.push_back(
          {p.rates[set], std::string(metric) == "psnr" ? p.psnrs[set] : p.ssims[set]});
    }
    std::sort(c.points.begin(), c.points.end(),
              [](const RDPoint& a, const RDPoint& b) { return a.rate_kbps < b.rate_kbps; });
    return c;
  };
  if (!rd_dir.empty()) {
    std::filesystem::create_directories(rd_dir);
    for (size_t s = 0; s < sets.size(); ++s) {
      for (const char* metric : {"psnr", "ssim"}) {
        const std::string text = emit_rd_curve(curve(s, metric));
        write_file(rd_dir + "/" + name + "_" + to_string(sets[s]) + "_" + metric + ".dat",
                   std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
      }
    }
  }

  for (const std::string& pair : bd_pairs) {
    const std::vector<std::string> parts = split(pair, ':');
    if (parts.size() != 2) throw InvalidArgument("--bd expects TEST:ANCHOR, got " + pair);
    auto index_of = [&](const std::string& s) {
      const LayerSet want = parse_layer_set(s);
      for (size_t i = 0; i < sets.size(); ++i) {
        if (sets[i] == want) return i;
      }
      throw InvalidArgument("--bd layer set " + s + " is not part of the sweep");
    };
    const size_t t = index_of(parts[0]);
    const size_t a = index_of(parts[1]);
    for (const char* metric : {"psnr", "ssim"}) {
      const double bd = bd_rate(curve(t, metric), curve(a, metric));
      std::printf("bd_rate %s %s vs %s: %+.3f%%\n", metric, to_string(sets[t]).c_str(),
                  to_string(sets[a]).c_str(), bd);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered generative-style video codec toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic test sequence");
  int size = 256, width = 0, height = 0, frames = 250, fps = 25, keypoints = 10;
  uint64_t seed = 0;
  double amplitude = 10.0, synth_tau = 24.0;
  std::string synth_out, synth_track;
  synth->add_option("--size", size, "square frame size")->capture_default_str();
  synth->add_option("--width", width, "frame width (overrides --size)");
  synth->add_option("--height", height, "frame height (overrides --size)");
  synth->add_option("--frames", frames, "frame count (>= 2)")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  synth->add_option("--fps", fps)->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("--keypoints", keypoints)->check(CLI::NonNegativeNumber)->capture_default_str();
  synth->add_option("--amplitude", amplitude, "max keypoint motion in pixels")
      ->capture_default_str();
  synth->add_option("--tau", synth_tau, "generating kernel bandwidth in pixels")
      ->capture_default_str();
  synth->add_option("-o,--output", synth_out, "PGRV output")->required();
  synth->add_option("--track-out", synth_track, "keypoint track output")->required();

  // encode
  auto* encode = app.add_subcommand("encode", "encode a PGRV sequence");
  encode->set_config("--config", "", "key=value configuration file");
  std::string enc_in, enc_track, enc_out;
  CodecFlags enc_flags;
  encode->add_option("-i,--input", enc_in, "PGRV input")->required();
  encode->add_option("--track", enc_track, "keypoint track sidecar")->required();
  encode->add_option("-o,--output", enc_out, ".pgen output")->required();
  enc_flags.add(encode, true);

  // decode
  auto* decode = app.add_subcommand("decode", "decode a .pgen stream to PGRV");
  std::string dec_in, dec_out, dec_layers;
  decode->add_option("-i,--input", dec_in, ".pgen input")->required();
  decode->add_option("-o,--output", dec_out, "PGRV output")->required();
  decode->add_option("--layers", dec_layers, "layers to decode (default: all present)");

  // extract
  auto* extract = app.add_subcommand("extract", "drop enhancement layers from a stream");
  std::string ext_in, ext_out, ext_layers;
  std::optional<double> ext_budget;
  extract->add_option("-i,--input", ext_in, ".pgen input")->required();
  extract->add_option("-o,--output", ext_out, ".pgen output")->required();
  auto* ext_l = extract->add_option("--layers", ext_layers, "layers to keep");
  auto* ext_b = extract->add_option("--budget", ext_budget, "kbps budget");
  ext_l->excludes(ext_b);

  // eval
  auto* eval = app.add_subcommand("eval", "compare two PGRV sequences");
  std::string ev_ref, ev_test, ev_stream;
  eval->add_option("--ref", ev_ref, "reference PGRV")->required();
  eval->add_option("--test", ev_test, "decoded PGRV")->required();
  eval->add_option("--stream", ev_stream, "stream whose size gives the rate");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "rate-distortion sweep over QPs and layer sets");
  sweep->set_config("--config", "", "key=value configuration file");
  std::string sw_in, sw_track, sw_qps = "2,12,22,32,42,52",
                               sw_sets = "base;base+8;base+8+16;base+8+16+32", sw_csv,
                               sw_rd, sw_name, sw_streams;
  std::vector<std::string> sw_bd;
  double sw_lambda = 1.0;
  int jobs = 1;
  CodecFlags sw_flags;
  sweep->add_option("-i,--input", sw_in, "PGRV input")->required();
  sweep->add_option("--track", sw_track, "keypoint track sidecar")->required();
  sweep->add_option("--qps", sw_qps, "comma-separated key-frame QPs")->capture_default_str();
  sweep->add_option("--layer-sets", sw_sets, "';'-separated layer sets")->capture_default_str();
  sweep->add_option("--csv", sw_csv, "CSV report output")->required();
  sweep->add_option("--rd-dir", sw_rd, "directory for two-column RD files");
  sweep->add_option("--streams-dir", sw_streams, "directory for the encoded streams");
  sweep->add_option("--name", sw_name, "sequence name (default: input file stem)");
  sweep->add_option("--bd", sw_bd, "BD-rate pair TEST:ANCHOR (repeatable)");
  sweep->add_option("--lambda", sw_lambda, "Lagrange multiplier for rd_cost (MSE + lambda*kbps)")
      ->capture_default_str();
  sweep->add_option("-j,--jobs", jobs, "parallel encodes")
      ->envname("PGEN_JOBS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sw_flags.add(sweep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) {
      return run_synth(size, width, height, frames, fps, seed, keypoints, amplitude, synth_tau,
                       synth_out, synth_track);
    }
    if (*encode) {
      const VideoSequence video = read_raw_video(read_file(enc_in));
      const KeypointTrack track = read_track(read_file(enc_track));
      const EncodeResult r = encode_sequence(video, track, enc_flags.config());
      write_file(enc_out, r.bytes);
      print_rates(r);
      return 0;
    }
    if (*decode) {
      std::optional<LayerSet> layers;
      if (!dec_layers.empty()) layers = parse_layer_set(dec_layers);
      const DecodedSequence d = decode_stream(read_file(dec_in), layers);
      write_file(dec_out, write_raw_video(d.video));
      std::printf("wrote %s (%zu frames)\n", dec_out.c_str(), d.video.frames.size());
      return 0;
    }
    if (*extract) {
      const std::vector<uint8_t> in = read_file(ext_in);
      LayerSet keep;
      if (ext_budget) {
        const LayeredStream s = read_stream(in);
        const LayerSelection sel = select_layers(
            measure_rates(s).rate_table(LayerSet{s.header.level_mask}), *ext_budget);
        if (!sel.fits) std::printf("warning: budget is below the base-layer rate\n");
        keep = sel.layers;
      } else if (!ext_layers.empty()) {
        keep = parse_layer_set(ext_layers);
      } else {
        throw InvalidArgument("extract needs --layers or --budget");
      }
      const std::vector<uint8_t> out = extract_substream(in, keep);
      write_file(ext_out, out);
      std::printf("kept %s: %zu of %zu bytes\n", to_string(keep).c_str(), out.size(), in.size());
      return 0;
    }
    if (*eval) {
      const VideoSequence ref = read_raw_video(read_file(ev_ref));
      const VideoSequence test = read_raw_video(read_file(ev_test));
      std::printf("psnr_db %.4f\nssim %.6f\n", psnr(ref, test), ssim(ref, test));
      if (!ev_stream.empty()) {
        const size_t bytes = read_file(ev_stream).size();
        std::printf("rate_kbps %.4f\n",
                    bitrate_kbps(bytes * 8, static_cast<int>(ref.frames.size()), ref.fps));
      }
      return 0;
    }
    if (*sweep) {
      return run_sweep(sw_in, sw_track, sw_qps, sw_sets, sw_flags, sw_lambda, sw_csv, sw_rd,
                       sw_name, sw_bd, sw_streams, jobs);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pgen: error: %s\n", e.what());
    return 1;
  }
  return 1;
}
