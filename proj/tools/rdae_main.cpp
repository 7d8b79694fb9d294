// Copyright 2026 The rdae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdae/audio.hpp"
#include "rdae/augment.hpp"
#include "rdae/config.hpp"
#include "rdae/error.hpp"
#include "rdae/feature_cache.hpp"
#include "rdae/features.hpp"
#include "rdae/handcrafted.hpp"
#include "rdae/harness.hpp"
#include "rdae/manifest.hpp"
#include "rdae/metrics.hpp"
#include "rdae/resample.hpp"
#include "rdae/synth.hpp"
#include "rdae/wav_io.hpp"

namespace fs = std::filesystem;

namespace {

// ---- Shared pipeline steps ------------------------------------------------------

// Canonical preprocessing chain. preprocess and featurize must agree bit for
// bit, so both call this.
std::vector<rdae::Segment> preprocess_utterance(const std::string& wav_path,
                                                const std::string& speaker_id,
                                                const std::string& utterance_id) {
  rdae::AudioClip clip = rdae::load_wav(wav_path);
  clip = rdae::to_mono(clip);
  clip = rdae::resample(clip, rdae::kCanonicalRateHz);
  clip = rdae::peak_normalize(clip);
  clip.speaker_id = speaker_id;
  clip.utterance_id = utterance_id;
  return rdae::segment_and_vad(clip);
}

// Noise preparation chain shared by augment and featurize.
rdae::NoiseSource load_noise_wav(const std::string& wav_path) {
  rdae::AudioClip clip = rdae::load_wav(wav_path);
  clip = rdae::to_mono(clip);
  clip = rdae::resample(clip, rdae::kCanonicalRateHz);
  rdae::NoiseSource noise;
  noise.name = fs::path(wav_path).stem().string();
  noise.samples = clip.mono();
  return rdae::highpass_noise(noise);
}

// Re-derives the exact waveform a manifest entry describes.
std::vector<double> realize_entry(const rdae::ManifestEntry& entry,
                                  const rdae::Segment& segment,
                                  const rdae::NoiseSource* noise) {
  if (!entry.noise_name) return segment.samples;
  if (noise == nullptr) {
    throw rdae::DataError("manifest entry " + entry.group_key +
                          " needs noise '" + *entry.noise_name + "'");
  }
  const rdae::SnrCondition snr = rdae::SnrCondition::level(entry.snr_db.value());
  const std::uint64_t seed =
      rdae::mix_stream_seed(entry.augment_seed, entry.group_key, noise->name, snr);
  const std::vector<double> excerpt =
      rdae::draw_noise_excerpt(*noise, segment.samples.size(), seed);
  rdae::MixResult mix = rdae::mix_at_snr(segment.samples, excerpt, *entry.snr_db);
  if (std::abs(mix.rescale_factor - entry.rescale_factor) > 1e-9) {
    throw rdae::DataError("manifest entry " + entry.group_key + "/" + *entry.noise_name +
                          "/" + snr.label() +
                          ": recomputed rescale factor disagrees with the manifest; "
                          "the manifest is stale");
  }
  return std::move(mix.samples);
}

void print_metrics(const rdae::MetricTables& metrics) {
  std::printf("overall accuracy: %.4f (%d/%d), macro-F1 %.4f\n", metrics.accuracy,
              metrics.correct, metrics.total, metrics.macro_f1);
  std::printf("%-12s %8s %8s %10s\n", "condition", "total", "correct", "accuracy");
  for (const rdae::ConditionAccuracy& c : metrics.per_snr) {
    std::printf("%-12s %8d %8d %10.4f\n", c.condition.c_str(), c.total, c.correct,
                c.accuracy);
  }
  if (!metrics.per_noise.empty()) {
    std::printf("by noise:");
    for (const rdae::ConditionAccuracy& c : metrics.per_noise) {
      std::printf(" %s=%.4f", c.condition.c_str(), c.accuracy);
    }
    std::printf("\n");
  }
}

std::vector<int> parse_snr_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw rdae::ArgumentError("--snrs: '" + item + "' is not an integer");
    }
    out.push_back(value);
    pos = comma + 1;
  }
  if (out.empty()) throw rdae::ArgumentError("--snrs: empty list");
  return out;
}

// ---- Subcommands ---------------------------------------------------------------

int cmd_synth_corpus(int speakers, int utterances, std::uint64_t seed,
                     const std::string& out_dir, double utterance_s, double noise_s) {
  rdae::CorpusSpec spec;
  spec.num_speakers = speakers;
  spec.utterances_per_speaker = utterances;
  spec.utterance_s = utterance_s;
  spec.noise_s = noise_s;
  spec.seed = seed;
  const rdae::CorpusPaths paths = rdae::write_synthetic_corpus(out_dir, spec);
  std::printf("wrote %d speakers x %d utterances (%.1f s each) under %s\n", speakers,
              utterances, utterance_s, paths.speech_dir.c_str());
  std::printf("wrote noise bank (white, pink, babble; %.1f s each) under %s\n", noise_s,
              paths.noise_dir.c_str());
  return 0;
}

int cmd_preprocess(const std::string& in_dir, const std::string& out_manifest) {
  if (!fs::is_directory(in_dir)) {
    throw rdae::IoError("--in: not a directory: " + in_dir);
  }
  // Layout: <in>/<speaker>/<utterance>.wav
  std::vector<std::pair<std::string, std::string>> files;  // (speaker, wav path)
  for (const fs::directory_entry& spk : fs::directory_iterator(in_dir)) {
    if (!spk.is_directory()) continue;
    for (const fs::directory_entry& wav : fs::directory_iterator(spk.path())) {
      if (wav.is_regular_file() && wav.path().extension() == ".wav") {
        files.emplace_back(spk.path().filename().string(), wav.path().string());
      }
    }
  }
  if (files.empty()) {
    throw rdae::DataError("no <speaker>/<utterance>.wav files under " + in_dir);
  }
  std::sort(files.begin(), files.end());

  std::vector<rdae::ManifestEntry> entries;
  int utterances = 0;
  for (const auto& [speaker, path] : files) {
    const std::string utterance = speaker + "/" + fs::path(path).stem().string();
    const std::vector<rdae::Segment> segments =
        preprocess_utterance(path, speaker, utterance);
    ++utterances;
    for (const rdae::Segment& seg : segments) {
      if (!seg.is_speech) continue;
      rdae::ManifestEntry e;
      e.group_key = rdae::make_group_key(utterance, seg.segment_index);
      e.speaker_id = speaker;
      e.utterance_id = utterance;
      e.segment_index = seg.segment_index;
      e.source_path = path;
      entries.push_back(std::move(e));
    }
  }
  rdae::write_manifest(out_manifest, entries);
  std::printf("preprocessed %d utterances -> %zu speech segments -> %s\n", utterances,
              entries.size(), out_manifest.c_str());
  return 0;
}

int cmd_augment(const std::string& manifest_path, const std::string& noise_dir,
                const std::string& snrs_text, std::uint64_t seed,
                const std::string& out_path, int budget_seconds) {
  const std::vector<int> snrs = parse_snr_list(snrs_text);

  std::vector<rdae::ManifestEntry> clean;
  for (rdae::ManifestEntry& e : rdae::read_manifest(manifest_path)) {
    if (!e.noise_name) clean.push_back(std::move(e));
  }
  if (clean.empty()) throw rdae::DataError("manifest has no clean entries");

  // Per-speaker material budget: each clean segment is one second, ordered
  // by utterance then segment index; everything past the budget is dropped
  // before expansion so whole groups disappear together.
  std::stable_sort(clean.begin(), clean.end(),
                   [](const rdae::ManifestEntry& a, const rdae::ManifestEntry& b) {
                     return std::tie(a.speaker_id, a.utterance_id, a.segment_index) <
                            std::tie(b.speaker_id, b.utterance_id, b.segment_index);
                   });
  if (budget_seconds > 0) {
    std::map<std::string, int> kept;
    std::vector<rdae::ManifestEntry> capped;
    for (rdae::ManifestEntry& e : clean) {
      if (kept[e.speaker_id] < budget_seconds) {
        ++kept[e.speaker_id];
        capped.push_back(std::move(e));
      }
    }
    clean = std::move(capped);
  }

  std::vector<std::pair<std::string, rdae::NoiseSource>> noises;  // (path, source)
  if (fs::is_directory(noise_dir)) {
    std::vector<std::string> paths;
    for (const fs::directory_entry& e : fs::directory_iterator(noise_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") {
        paths.push_back(e.path().string());
      }
    }
    std::sort(paths.begin(), paths.end());
    for (const std::string& p : paths) noises.emplace_back(p, load_noise_wav(p));
  }
  if (noises.empty()) {
    throw rdae::DataError("no noise WAV files under " + noise_dir);
  }

  // Segments per source utterance, loaded once.
  std::map<std::string, std::vector<rdae::Segment>> segments_by_source;
  for (const rdae::ManifestEntry& e : clean) {
    if (!segments_by_source.count(e.source_path)) {
      segments_by_source[e.source_path] =
          preprocess_utterance(e.source_path, e.speaker_id, e.utterance_id);
    }
  }

  std::vector<rdae::ManifestEntry> expanded;
  for (const rdae::ManifestEntry& base : clean) {
    expanded.push_back(base);
    const std::vector<rdae::Segment>& segs = segments_by_source.at(base.source_path);
    if (base.segment_index < 0 ||
        static_cast<std::size_t>(base.segment_index) >= segs.size()) {
      throw rdae::DataError("manifest entry " + base.group_key +
                            ": segment index out of range for " + base.source_path);
    }
    const rdae::Segment& seg = segs[static_cast<std::size_t>(base.segment_index)];
    for (const auto& [noise_path, noise] : noises) {
      for (int snr : snrs) {
        rdae::ManifestEntry e = base;
        e.noise_name = noise.name;
        e.snr_db = snr;
        e.noise_path = noise_path;
        e.augment_seed = seed;
        const std::uint64_t mix_seed = rdae::mix_stream_seed(
            seed, e.group_key, noise.name, rdae::SnrCondition::level(snr));
        const std::vector<double> excerpt =
            rdae::draw_noise_excerpt(noise, seg.samples.size(), mix_seed);
        e.rescale_factor = rdae::mix_at_snr(seg.samples, excerpt, snr).rescale_factor;
        expanded.push_back(std::move(e));
      }
    }
  }

  const std::string dest = out_path.empty() ? manifest_path : out_path;
  rdae::write_manifest(dest, expanded);
  std::printf("augmented %zu clean segments x %zu noises x %zu SNRs -> %zu entries -> %s\n",
              clean.size(), noises.size(), snrs.size(), expanded.size(), dest.c_str());
  return 0;
}

int cmd_featurize(const std::string& manifest_path, const std::string& cache_path,
                  bool handcrafted) {
  std::vector<rdae::ManifestEntry> entries = rdae::read_manifest(manifest_path);
  if (entries.empty()) throw rdae::DataError("manifest is empty: " + manifest_path);

  std::map<std::string, std::vector<rdae::Segment>> segments_by_source;
  std::map<std::string, rdae::NoiseSource> noise_by_path;
  for (const rdae::ManifestEntry& e : entries) {
    if (!segments_by_source.count(e.source_path)) {
      segments_by_source[e.source_path] =
          preprocess_utterance(e.source_path, e.speaker_id, e.utterance_id);
    }
    if (e.noise_path && !noise_by_path.count(*e.noise_path)) {
      noise_by_path[*e.noise_path] = load_noise_wav(*e.noise_path);
    }
  }

  rdae::CacheHeader header;
  if (handcrafted) {
    header.kind = "handcrafted";
    header.dims = {rdae::kHandcraftedDim};
    header.layout = rdae::handcrafted_layout_description();
  } else {
    header.kind = "mel";
    header.dims = {rdae::kFramesPerSegment, rdae::kMelBands};
    header.layout = "time x mel (log power)";
  }

  rdae::FeatureCacheWriter writer(cache_path, header);
  for (rdae::ManifestEntry& e : entries) {
    const std::vector<rdae::Segment>& segs = segments_by_source.at(e.source_path);
    if (e.segment_index < 0 || static_cast<std::size_t>(e.segment_index) >= segs.size()) {
      throw rdae::DataError("manifest entry " + e.group_key +
                            ": segment index out of range for " + e.source_path);
    }
    const rdae::NoiseSource* noise =
        e.noise_path ? &noise_by_path.at(*e.noise_path) : nullptr;
    const std::vector<double> samples =
        realize_entry(e, segs[static_cast<std::size_t>(e.segment_index)], noise);

    Eigen::MatrixXd features;
    if (handcrafted) {
      const rdae::HandcraftedVector v = rdae::handcrafted_features(samples);
      features.resize(1, rdae::kHandcraftedDim);
      for (int i = 0; i < rdae::kHandcraftedDim; ++i) features(0, i) = v[static_cast<std::size_t>(i)];
    } else {
      features = rdae::melspectrogram(samples);
    }

    rdae::CacheRecordMeta meta;
    meta.group_key = e.group_key;
    meta.speaker_id = e.speaker_id;
    meta.utterance_id = e.utterance_id;
    meta.segment_index = e.segment_index;
    meta.noise_name = e.noise_name;
    meta.snr_db = e.snr_db;
    e.cache_offset = writer.append(meta, features);
  }
  writer.finalize();
  rdae::write_manifest(manifest_path, entries);
  std::printf("featurized %zu entries (%s) -> %s\n", entries.size(),
              handcrafted ? "handcrafted" : "mel", cache_path.c_str());
  return 0;
}

int cmd_train(const std::string& system_name, const std::string& cache_path,
              const std::string& grid_path, std::optional<std::uint64_t> seed_flag,
              const std::string& out_dir, const std::vector<std::string>& overrides) {
  rdae::KeyValueConfig config;
  if (!grid_path.empty()) config = rdae::KeyValueConfig::parse_file(grid_path);
  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw rdae::ArgumentError("--set expects key=value, got '" + kv + "'");
    }
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed_flag) config.set("seed", std::to_string(*seed_flag));

  const rdae::System system = rdae::parse_system(system_name);
  const rdae::GridSpec grid = rdae::GridSpec::from_config(config);
  const rdae::HarnessOptions options = rdae::HarnessOptions::from_config(config);

  rdae::FeatureStore store(cache_path);
  const rdae::RunResult result =
      rdae::run_system(system, store, grid, options, options.train.seed, out_dir);

  std::printf("system %s, seed %llu, wall time %.1f s\n", result.system.c_str(),
              static_cast<unsigned long long>(result.seed), result.wall_time_s);
  if (!result.chosen_hyperparams.empty()) {
    std::printf("chosen grid point:");
    for (const auto& [axis, value] : result.chosen_hyperparams) {
      std::printf(" %s=%s", axis.c_str(), value.c_str());
    }
    std::printf("\n");
  }
  print_metrics(result.metrics);
  if (!out_dir.empty()) std::printf("artifacts under %s\n", out_dir.c_str());
  return 0;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& cache_path) {
  rdae::FeatureStore store(cache_path);
  const rdae::MetricTables metrics = rdae::evaluate_checkpoint(checkpoint_path, store);
  print_metrics(metrics);
  return 0;
}

int cmd_compare(const std::string& results_dir, const std::string& out_dir) {
  if (!fs::is_directory(results_dir)) {
    throw rdae::IoError("--results: not a directory: " + results_dir);
  }
  std::vector<std::string> paths;
  for (const fs::directory_entry& e : fs::recursive_directory_iterator(results_dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > 12 &&
        name.substr(name.size() - 12) == "_result.json") {
      paths.push_back(e.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw rdae::DataError("no *_result.json files under " + results_dir);
  }
  std::vector<rdae::RunResult> results;
  for (const std::string& p : paths) results.push_back(rdae::load_run_result(p));
  rdae::emit_report(results, out_dir);
  for (const rdae::RunResult& r : results) {
    std::printf("%-12s accuracy %.4f, macro-F1 %.4f\n", r.system.c_str(),
                r.metrics.accuracy, r.metrics.macro_f1);
  }
  std::printf("report written to %s/report.md and %s/report.csv\n", out_dir.c_str(),
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrent denoising autoencoder speaker-identification pipeline"};
  app.require_subcommand(1);

  // synth-corpus
  int sc_speakers = 5, sc_utterances = 15;
  std::uint64_t sc_seed = 0;
  std::string sc_out;
  double sc_utt_s = 4.0, sc_noise_s = 60.0;
  CLI::App* synth = app.add_subcommand("synth-corpus", "Generate a synthetic WAV corpus");
  synth->add_option("--speakers", sc_speakers, "Number of speakers")->required();
  synth->add_option("--utterances", sc_utterances, "Utterances per speaker")->required();
  synth->add_option("--seed", sc_seed, "Master seed")->required();
  synth->add_option("--out", sc_out, "Output directory")->required();
  synth->add_option("--utterance-seconds", sc_utt_s, "Seconds per utterance");
  synth->add_option("--noise-seconds", sc_noise_s, "Seconds per noise file");

  // preprocess
  std::string pp_in, pp_out;
  CLI::App* pre = app.add_subcommand(
      "preprocess", "Scan <speaker>/<utterance>.wav files into a segment manifest");
  pre->add_option("--in", pp_in, "Corpus directory")->required();
  pre->add_option("--out", pp_out, "Manifest to write (JSONL)")->required();

  // augment
  std::string ag_manifest, ag_noises, ag_snrs = "-5,0,5,10,15,20", ag_out;
  std::uint64_t ag_seed = 0;
  int ag_budget = 600;
  CLI::App* aug = app.add_subcommand(
      "augment", "Expand a clean manifest into the multi-condition grid");
  aug->add_option("--manifest", ag_manifest, "Manifest from preprocess")->required();
  aug->add_option("--noises", ag_noises, "Directory of noise WAVs")->required();
  aug->add_option("--snrs", ag_snrs, "Comma-separated SNR levels in dB");
  aug->add_option("--seed", ag_seed, "Master augmentation seed")->required();
  aug->add_option("--out", ag_out, "Output manifest (default: rewrite --manifest)");
  aug->add_option("--budget-seconds", ag_budget,
                  "Per-speaker clean-speech cap in seconds (0 = unlimited)");

  // featurize
  std::string fz_manifest, fz_cache;
  bool fz_handcrafted = false;
  CLI::App* fea = app.add_subcommand(
      "featurize", "Compute features for every manifest entry into a cache");
  fea->add_option("--manifest", fz_manifest, "Augmented manifest")->required();
  fea->add_option("--cache", fz_cache, "Feature cache to write")->required();
  fea->add_flag("--handcrafted", fz_handcrafted,
                "Handcrafted 40-dim vectors instead of log-mel spectrograms");

  // train
  std::string tr_system, tr_cache, tr_grid, tr_out;
  std::optional<std::uint64_t> tr_seed;
  std::vector<std::string> tr_set;
  CLI::App* tra = app.add_subcommand("train", "Nested-CV training for one system");
  tra->add_option("--system", tr_system, "jrdae | irdae | trdae | handcrafted")->required();
  tra->add_option("--cache", tr_cache, "Feature cache")->required();
  tra->add_option("--grid", tr_grid, "Config file (flat key = value)");
  tra->add_option("--seed", tr_seed, "Master seed (overrides the config file)");
  tra->add_option("--out", tr_out, "Artifact directory")->required();
  tra->add_option("--set", tr_set, "Override a config key, e.g. --set epochs=5");

  // evaluate
  std::string ev_ckpt, ev_cache;
  CLI::App* eva = app.add_subcommand(
      "evaluate", "Evaluate a checkpoint on its recorded outer test groups");
  eva->add_option("--checkpoint", ev_ckpt, "Checkpoint file")->required();
  eva->add_option("--cache", ev_cache, "Feature cache")->required();

  // compare
  std::string cp_results, cp_out;
  CLI::App* cmp = app.add_subcommand(
      "compare", "Aggregate saved run results into the comparison report");
  cmp->add_option("--results", cp_results, "Directory of *_result.json files")->required();
  cmp->add_option("--out", cp_out, "Report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth_corpus(sc_speakers, sc_utterances, sc_seed, sc_out, sc_utt_s,
                              sc_noise_s);
    }
    if (pre->parsed()) return cmd_preprocess(pp_in, pp_out);
    if (aug->parsed()) {
      return cmd_augment(ag_manifest, ag_noises, ag_snrs, ag_seed, ag_out, ag_budget);
    }
    if (fea->parsed()) return cmd_featurize(fz_manifest, fz_cache, fz_handcrafted);
    if (tra->parsed()) {
      return cmd_train(tr_system, tr_cache, tr_grid, tr_seed, tr_out, tr_set);
    }
    if (eva->parsed()) return cmd_evaluate(ev_ckpt, ev_cache);
    if (cmp->parsed()) return cmd_compare(cp_results, cp_out);
    return 2;
  } catch (const rdae::ArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const rdae::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const rdae::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const rdae::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const rdae::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
