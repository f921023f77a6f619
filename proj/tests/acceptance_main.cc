// tests/acceptance_main.cc

// Copyright 2026  The mtml Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite.  Each criterion prints one PASS/FAIL line; the process
// exits with the number of failures.  Criteria:
//   1. gradient suite (embedder, similarity, ml/ce/combined losses) vs
//      central finite differences, >= 50 random configurations each,
//      max relative error < 1e-5, under 60 s
//   2. weight/gradient identity on 200 mined batches to 1e-10
//   3. mining equals the brute-force reference on 200 batches, both rules
//   4. eer / min-dcf match exhaustive sweep oracles on 500 score sets
//   5. multi-task blend (eta=0.3) beats the pure-CE baseline by >= 5% mean
//      relative held-out EER over 5 seeds, under 10 min
//   6. eta=1.0 (no classification task) is worse than eta=0.3
//   7. two identical CLI runs produce bitwise-identical artifacts
//   8. corpus / checkpoint / trial / score files round-trip exactly

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mtml/common.h"
#include "mtml/config.h"
#include "mtml/eval.h"
#include "mtml/similarity.h"
#include "mtml/trainer.h"
#include "testutil.h"

namespace fs = std::filesystem;
using namespace mtml;
using mtml_test::RandomMatrix;

namespace {

std::string g_cli;
fs::path g_scratch;
int g_failures = 0;

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

void Report(int id, const std::string &name, bool pass,
            const std::string &detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": "
            << name << " (" << detail << ")\n";
  if (!pass) ++g_failures;
}

std::string ReadAll(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

Matrix SoftmaxRows(const Matrix &logits) {
  Matrix p(logits.NumRows(), logits.NumCols());
  for (int i = 0; i < logits.NumRows(); ++i) {
    double max_logit = logits(i, 0);
    for (int c = 1; c < logits.NumCols(); ++c)
      max_logit = std::max(max_logit, logits(i, c));
    double denom = 0.0;
    for (int c = 0; c < logits.NumCols(); ++c) {
      p(i, c) = std::exp(logits(i, c) - max_logit);
      denom += p(i, c);
    }
    for (int c = 0; c < logits.NumCols(); ++c) p(i, c) /= denom;
  }
  return p;
}

// Smallest |pre-activation| across the frame stack and the FC1 ReLU input.
// Finite differences are meaningless within h of a ReLU kink, so draws that
// land close to one are rejected and redrawn.
double MinAbsPreactivation(const ModelParams &params,
                           const std::vector<Matrix> &inputs) {
  ParamLayout layout = MakeLayout(params.config);
  double closest = std::numeric_limits<double>::infinity();
  for (const Matrix &frames : inputs) {
    Matrix current = frames;
    for (const auto &entry : layout.frame) {
      Matrix next(current.NumRows(), entry.out);
      for (int t = 0; t < current.NumRows(); ++t)
        for (int o = 0; o < entry.out; ++o) {
          double z = params.flat[entry.bias_offset + o];
          const double *w = params.flat.data() + entry.weight_offset +
                            static_cast<size_t>(o) * entry.in;
          for (int k = 0; k < entry.in; ++k) z += w[k] * current(t, k);
          closest = std::min(closest, std::abs(z));
          next(t, o) = z > 0.0 ? z : 0.0;
        }
      current = std::move(next);
    }
  }
  ForwardTrace trace = ForwardFrames(params, inputs);
  for (double e : trace.embeddings.Data())
    closest = std::min(closest, std::abs(e));
  return closest;
}

struct MinedBatch {
  SimilarityMatrix sim;
  std::vector<int32_t> labels;
  PairSelection selection;
};

MinedBatch RandomMinedBatch(int batch, RngStream *rng, double margin) {
  MinedBatch out;
  out.sim = ComputeSimilarity(RandomMatrix(batch, 4, rng), true);
  out.labels = mtml_test::RandomLabels(batch, 3, rng);
  MiningConfig mining;
  mining.margin = margin;
  out.selection = MinePairs(out.sim, out.labels, mining);
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 1
// ---------------------------------------------------------------------------

void Criterion1() {
  auto start = std::chrono::steady_clock::now();
  double max_rel = 0.0;
  bool ok = true;
  RngStream rng(20260810, 1);

  // Embedder: full parameter gradient on random small architectures.
  for (int trial = 0; trial < 50; ++trial) {
    EmbedderConfig config;
    config.input_dim = 2 + static_cast<int>(rng.UniformInt(3));
    int depth = static_cast<int>(rng.UniformInt(3));
    for (int l = 0; l < depth; ++l)
      config.frame_layers.push_back(3 + static_cast<int>(rng.UniformInt(4)));
    if (depth == 0) config.frame_layers.clear();
    config.embed_dim = 2 + static_cast<int>(rng.UniformInt(3));
    config.n_classes = 2 + static_cast<int>(rng.UniformInt(3));
    ModelParams params = InitParams(config, 900 + trial);

    int batch = 2 + static_cast<int>(rng.UniformInt(2));
    int frames = 2 + static_cast<int>(rng.UniformInt(4));
    std::vector<Matrix> inputs;
    for (int redraw = 0; redraw < 200; ++redraw) {
      inputs.clear();
      for (int i = 0; i < batch; ++i)
        inputs.push_back(RandomMatrix(frames, config.input_dim, &rng));
      if (MinAbsPreactivation(params, inputs) > 1e-3) break;
    }
    Matrix grad_embeddings = RandomMatrix(batch, config.embed_dim, &rng);
    Matrix grad_logits = RandomMatrix(batch, config.n_classes, &rng);

    ForwardTrace trace = ForwardFrames(params, inputs);
    std::vector<double> analytic =
        Backward(params, trace, grad_embeddings, grad_logits);
    auto loss = [&]() {
      ForwardTrace t = ForwardFrames(params, inputs);
      double sum = 0.0;
      for (int i = 0; i < batch; ++i) {
        for (int d = 0; d < config.embed_dim; ++d)
          sum += grad_embeddings(i, d) * t.embeddings(i, d);
        for (int c = 0; c < config.n_classes; ++c)
          sum += grad_logits(i, c) * t.logits(i, c);
      }
      return sum;
    };
    auto result = mtml_test::CheckGradient(&params.flat, analytic, loss);
    ok = ok && result.ok;
    max_rel = std::max(max_rel, result.max_rel_error);
  }

  // Similarity backward, both normalization modes.
  for (int trial = 0; trial < 50; ++trial) {
    int batch = 3 + static_cast<int>(rng.UniformInt(4));
    int dim = 2 + static_cast<int>(rng.UniformInt(4));
    bool normalize = trial % 2 == 0;
    Matrix embeddings = RandomMatrix(batch, dim, &rng);
    Matrix grad_s = RandomMatrix(batch, batch, &rng);
    std::vector<double> analytic =
        SimilarityBackward(embeddings, grad_s, normalize).Data();
    auto loss = [&]() {
      SimilarityMatrix sim = ComputeSimilarity(embeddings, normalize);
      double sum = 0.0;
      for (int i = 0; i < batch; ++i)
        for (int j = 0; j < batch; ++j) sum += grad_s(i, j) * sim.s(i, j);
      return sum;
    };
    auto result = mtml_test::CheckGradient(&embeddings.Data(), analytic, loss);
    ok = ok && result.ok;
    max_rel = std::max(max_rel, result.max_rel_error);
  }

  // ML loss with respect to the similarity entries, selection held fixed.
  for (int trial = 0; trial < 50; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(7));
    MinedBatch mined = RandomMinedBatch(batch, &rng, 0.2 + rng.NextDouble());
    WeightConfig weighting;
    std::vector<double> analytic =
        MlLoss(mined.sim, mined.selection, weighting, batch)
            .grad_similarity.Data();
    auto loss = [&]() {
      return MlLoss(mined.sim, mined.selection, weighting, batch).value;
    };
    auto result = mtml_test::CheckGradient(&mined.sim.s.Data(), analytic, loss);
    ok = ok && result.ok;
    max_rel = std::max(max_rel, result.max_rel_error);
  }

  // CE loss through the softmax composite.
  for (int trial = 0; trial < 50; ++trial) {
    int batch = 2 + static_cast<int>(rng.UniformInt(4));
    int n_classes = 2 + static_cast<int>(rng.UniformInt(4));
    Matrix logits = RandomMatrix(batch, n_classes, &rng);
    std::vector<int32_t> labels(batch);
    for (auto &l : labels) l = static_cast<int32_t>(rng.UniformInt(n_classes));
    std::vector<double> analytic =
        CeLoss(SoftmaxRows(logits), labels).grad_logits.Data();
    auto loss = [&]() { return CeLoss(SoftmaxRows(logits), labels).value; };
    auto result = mtml_test::CheckGradient(&logits.Data(), analytic, loss);
    ok = ok && result.ok;
    max_rel = std::max(max_rel, result.max_rel_error);
  }

  // Combined loss: both gradient paths at a random blend weight.
  for (int trial = 0; trial < 50; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(5));
    MinedBatch mined = RandomMinedBatch(batch, &rng, 0.2 + rng.NextDouble());
    Matrix logits = RandomMatrix(batch, 3, &rng);
    std::vector<int32_t> labels(batch);
    for (auto &l : labels) l = static_cast<int32_t>(rng.UniformInt(3));
    double eta = rng.NextDouble();
    WeightConfig weighting;

    auto blended = [&]() {
      LossValue ml = MlLoss(mined.sim, mined.selection, weighting, batch);
      LossValue ce = CeLoss(SoftmaxRows(logits), labels);
      return CombinedLoss(ml, ce, eta);
    };
    LossValue at_point = blended();
    auto value = [&]() { return blended().value; };

    auto sim_result = mtml_test::CheckGradient(
        &mined.sim.s.Data(), at_point.grad_similarity.Data(), value);
    auto logit_result = mtml_test::CheckGradient(
        &logits.Data(), at_point.grad_logits.Data(), value);
    ok = ok && sim_result.ok && logit_result.ok;
    max_rel = std::max({max_rel, sim_result.max_rel_error,
                        logit_result.max_rel_error});
  }

  double elapsed = Seconds(start);
  ok = ok && max_rel < 1e-5 && elapsed < 60.0;
  std::ostringstream detail;
  detail << "max rel err " << max_rel << " (limit 1e-5), " << elapsed
         << " s (limit 60)";
  Report(1, "finite-difference gradient suite", ok, detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 2
// ---------------------------------------------------------------------------

void Criterion2() {
  RngStream rng(20260810, 2);
  double worst = 0.0;
  bool ok = true;
  int64_t pairs_checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(10));
    MinedBatch mined = RandomMinedBatch(batch, &rng, 0.1 + rng.NextDouble() * 0.6);
    WeightConfig weighting;
    WeighPairs(mined.sim, weighting, &mined.selection);
    LossValue loss = MlLoss(mined.sim, mined.selection, weighting, batch);

    Matrix selected_mask(batch, batch);
    for (int i = 0; i < batch; ++i) {
      for (size_t a = 0; a < mined.selection.positives[i].size(); ++a) {
        int j = mined.selection.positives[i][a];
        selected_mask(i, j) = 1.0;
        double diff = std::abs(batch * std::abs(loss.grad_similarity(i, j)) -
                               mined.selection.positive_weights[i][a]);
        worst = std::max(worst, diff);
        ++pairs_checked;
      }
      for (size_t a = 0; a < mined.selection.negatives[i].size(); ++a) {
        int j = mined.selection.negatives[i][a];
        selected_mask(i, j) = 1.0;
        double diff = std::abs(batch * std::abs(loss.grad_similarity(i, j)) -
                               mined.selection.negative_weights[i][a]);
        worst = std::max(worst, diff);
        ++pairs_checked;
      }
    }
    // Gradient must vanish exactly outside the selected ordered pairs.
    for (int i = 0; i < batch; ++i)
      for (int j = 0; j < batch; ++j)
        if (selected_mask(i, j) == 0.0 && loss.grad_similarity(i, j) != 0.0)
          ok = false;
  }
  ok = ok && worst <= 1e-10 && pairs_checked > 0;
  std::ostringstream detail;
  detail << pairs_checked << " selected pairs, max |D*|grad| - w| = " << worst
         << " (limit 1e-10)";
  Report(2, "pair-weight / loss-gradient identity", ok, detail.str());
}

// ---------------------------------------------------------------------------
// Criterion 3
// ---------------------------------------------------------------------------

void Criterion3() {
  RngStream rng(20260810, 3);
  bool ok = true;
  int64_t batches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int batch = 4 + static_cast<int>(rng.UniformInt(12));
    SimilarityMatrix sim = ComputeSimilarity(RandomMatrix(batch, 4, &rng), true);
    std::vector<int32_t> labels =
        mtml_test::RandomLabels(batch, 2 + static_cast<int>(rng.UniformInt(3)), &rng);
    double epsilon = rng.NextDouble() * 0.5;
    for (bool hard : {true, false}) {
      MiningConfig config;
      config.margin = epsilon;
      config.positive_rule =
          hard ? PositiveRule::kHardPositive : PositiveRule::kLiteralEq3;
      PairSelection selection = MinePairs(sim, labels, config);
      mtml_test::MinedSets oracle =
          mtml_test::BruteForceMinePairs(sim.s, labels, epsilon, hard);
      if (selection.positives != oracle.positives ||
          selection.negatives != oracle.negatives)
        ok = false;
      ++batches;
    }
  }
  Report(3, "mining equals the brute-force reference", ok,
         std::to_string(batches) + " batches (both positive rules), exact set equality");
}

// ---------------------------------------------------------------------------
// Criterion 4
// ---------------------------------------------------------------------------

void Criterion4() {
  RngStream rng(20260810, 4);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    int n_target = 1 + static_cast<int>(rng.UniformInt(40));
    int n_nontarget = 1 + static_cast<int>(rng.UniformInt(40));
    bool quantize = rng.NextDouble() < 0.5;
    std::vector<double> scores;
    std::vector<uint8_t> labels;
    for (int i = 0; i < n_target + n_nontarget; ++i) {
      double s = rng.NextGaussian() + (i < n_target ? 0.4 : -0.4);
      if (quantize) s = std::round(s * 4.0) / 4.0;
      scores.push_back(s);
      labels.push_back(i < n_target ? 1 : 0);
    }
    double eer_diff = std::abs(ComputeEer(scores, labels) -
                               mtml_test::OracleEer(scores, labels));
    worst = std::max(worst, eer_diff);
    for (double p_tar : {0.01, 0.001}) {
      double dcf = ComputeMinDcf(scores, labels, p_tar);
      double dcf_diff =
          std::abs(dcf - mtml_test::OracleMinDcf(scores, labels, p_tar));
      worst = std::max(worst, dcf_diff);
      if (dcf > 1.0 + 1e-12) ok = false;
    }
  }
  ok = ok && worst < 1e-12;
  std::ostringstream detail;
  detail << "500 score sets, max |impl - oracle| = " << worst
         << " (limit 1e-12), p_tar in {0.01, 0.001}";
  Report(4, "eer / min-dcf exhaustive-sweep oracle", ok, detail.str());
}

// ---------------------------------------------------------------------------
// Criteria 5 and 6 (shared training runs)
// ---------------------------------------------------------------------------

double HeldOutEer(const Corpus &train_corpus, const Corpus &eval_corpus,
                  const TrialSet &trials, double eta, uint64_t train_seed) {
  EmbedderConfig embedder;
  embedder.frame_layers = {64, 64};
  embedder.embed_dim = 16;

  BatchSpec batch{8, 4};
  MultiTaskConfig multitask;
  multitask.eta = eta;
  TrainConfig config;
  config.steps = 300;
  config.seed = train_seed;

  TrainResult result = Train(train_corpus, embedder, batch, multitask, config);

  Matrix embeddings = EmbedUtterances(result.params, eval_corpus.utterances);
  std::map<int32_t, std::vector<double>> by_utt;
  for (size_t i = 0; i < eval_corpus.utterances.size(); ++i) {
    const double *row = embeddings.RowData(static_cast<int>(i));
    by_utt[eval_corpus.utterances[i].utt_id] =
        std::vector<double>(row, row + embeddings.NumCols());
  }
  Backend backend = Backend::PassThrough(BackendConfig{});
  ScoreReport report = EvaluateTrials(by_utt, trials, backend);
  return report.eer;
}

void Criteria5And6() {
  auto start = std::chrono::steady_clock::now();
  const int kSeeds = 5;
  double mean_ce = 0.0, mean_mtml = 0.0, mean_pure = 0.0;

  for (int s = 0; s < kSeeds; ++s) {
    CorpusSpec train_spec;
    train_spec.n_speakers = 50;
    train_spec.utts_per_speaker = 10;
    train_spec.feat_dim = 30;
    train_spec.frames_min = 20;
    train_spec.frames_max = 40;
    train_spec.between_speaker_std = 1.0;
    train_spec.within_speaker_std = 0.6;
    train_spec.seed = 1000 + s;
    CorpusSpec eval_spec = train_spec;
    eval_spec.n_speakers = 20;
    eval_spec.utts_per_speaker = 8;
    eval_spec.seed = 2000 + s;

    Corpus train_corpus = GenerateCorpus(train_spec, Split::kTrain);
    Corpus eval_corpus = GenerateCorpus(eval_spec, Split::kEval);
    TrialSet trials = MakeTrials(eval_corpus, 500, 2000, 4000 + s);

    uint64_t train_seed = 3000 + s;
    double eer_ce = HeldOutEer(train_corpus, eval_corpus, trials, 0.0, train_seed);
    double eer_mtml =
        HeldOutEer(train_corpus, eval_corpus, trials, 0.3, train_seed);
    double eer_pure =
        HeldOutEer(train_corpus, eval_corpus, trials, 1.0, train_seed);
    std::cout << "  seed " << s << ": eer(eta=0) = " << eer_ce
              << ", eer(eta=0.3) = " << eer_mtml
              << ", eer(eta=1) = " << eer_pure << "\n";
    mean_ce += eer_ce / kSeeds;
    mean_mtml += eer_mtml / kSeeds;
    mean_pure += eer_pure / kSeeds;
  }

  double elapsed = Seconds(start);
  double improvement = (mean_ce - mean_mtml) / mean_ce;
  bool pass5 = mean_mtml < mean_ce && improvement >= 0.05 && elapsed < 600.0;
  std::ostringstream detail5;
  detail5 << "mean eer: ce-only " << mean_ce << ", blend " << mean_mtml
          << ", rel improvement " << 100.0 * improvement
          << "% (need >= 5%), " << elapsed << " s (limit 600)";
  Report(5, "multi-task blend beats the CE baseline", pass5, detail5.str());

  bool pass6 = mean_pure > mean_mtml;
  std::ostringstream detail6;
  detail6 << "mean eer: metric-only " << mean_pure << " vs blend " << mean_mtml;
  Report(6, "dropping the main task degrades the metric-only system", pass6,
         detail6.str());
}

// ---------------------------------------------------------------------------
// Criterion 7
// ---------------------------------------------------------------------------

const char *kCliConfig = R"({
  "corpus": {
    "feat_dim": 8,
    "frames_min": 6,
    "frames_max": 10,
    "between_speaker_std": 1.2,
    "within_speaker_std": 0.4,
    "train": {"n_speakers": 6, "utts_per_speaker": 4},
    "eval": {"n_speakers": 4, "utts_per_speaker": 4}
  },
  "batch": {"speakers_per_batch": 3, "utts_per_speaker": 2},
  "embedder": {"frame_layers": [12], "embed_dim": 6},
  "multitask": {"eta": 0.3},
  "train": {"steps": 40},
  "trials": {"n_target": 16, "n_nontarget": 32},
  "seeds": {"corpus_train": 11, "corpus_eval": 12, "train": 13, "trials": 14}
})";

int RunCli(const std::string &args) {
  std::string command = g_cli + " " + args + " >/dev/null 2>&1";
  int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void Criterion7() {
  bool ok = !g_cli.empty();
  std::string detail = "cli binary missing";
  if (ok) {
    fs::path base = g_scratch / "determinism";
    fs::remove_all(base);
    std::vector<std::string> artifacts = {"train.svc",  "eval.svc",
                                          "trials.tsv", "model.ckpt",
                                          "train.log.tsv", "report.json",
                                          "scores.tsv", "det.tsv"};
    for (const char *run : {"run1", "run2"}) {
      fs::path dir = base / run;
      fs::create_directories(dir);
      std::ofstream(dir / "config.json") << kCliConfig;
      std::string config = (dir / "config.json").string();
      auto at = [&dir](const std::string &name) {
        return (dir / name).string();
      };
      ok = ok &&
           RunCli("gen-data --config " + config + " --split train --out " +
                  at("train.svc")) == 0 &&
           RunCli("gen-data --config " + config + " --split eval --out " +
                  at("eval.svc")) == 0 &&
           RunCli("make-trials --config " + config + " --corpus " +
                  at("eval.svc") + " --out " + at("trials.tsv")) == 0 &&
           RunCli("train --config " + config + " --corpus " + at("train.svc") +
                  " --out " + at("model.ckpt") + " --log " +
                  at("train.log.tsv")) == 0 &&
           RunCli("eval --config " + config + " --checkpoint " +
                  at("model.ckpt") + " --corpus " + at("eval.svc") +
                  " --trials " + at("trials.tsv") + " --report " +
                  at("report.json") + " --scores " + at("scores.tsv") +
                  " --det " + at("det.tsv")) == 0;
      if (!ok) {
        detail = std::string("a command failed in ") + run;
        break;
      }
    }
    if (ok) {
      int identical = 0;
      for (const std::string &name : artifacts) {
        if (ReadAll(base / "run1" / name) == ReadAll(base / "run2" / name))
          ++identical;
        else
          ok = false;
      }
      detail = std::to_string(identical) + "/" +
               std::to_string(artifacts.size()) +
               " artifacts bitwise identical across two full CLI runs";
    }
  }
  Report(7, "end-to-end determinism", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 8
// ---------------------------------------------------------------------------

void Criterion8() {
  bool ok = true;
  std::string failed;
  fs::path dir = g_scratch / "roundtrip";
  fs::create_directories(dir);

  // Corpus.
  CorpusSpec spec;
  spec.n_speakers = 4;
  spec.utts_per_speaker = 3;
  spec.feat_dim = 5;
  spec.frames_min = 4;
  spec.frames_max = 7;
  spec.seed = 77;
  Corpus corpus = GenerateCorpus(spec, Split::kEval);
  WriteCorpus(corpus, (dir / "c.svc").string());
  if (!(ReadCorpus((dir / "c.svc").string()) == corpus)) {
    ok = false;
    failed += " corpus";
  }

  // Checkpoint with optimizer state.
  EmbedderConfig embedder;
  embedder.input_dim = 5;
  embedder.frame_layers = {6};
  embedder.embed_dim = 4;
  embedder.n_classes = 4;
  ModelParams params = InitParams(embedder, 5);
  CheckpointState state;
  state.step = 17;
  RngStream srng(6, 0);
  for (size_t i = 0; i < params.flat.size(); ++i) {
    state.adam_m.push_back(srng.NextGaussian() * 1e-3);
    state.adam_v.push_back(std::abs(srng.NextGaussian()) * 1e-6);
  }
  Checkpoint checkpoint{params, state};
  WriteCheckpoint(checkpoint, (dir / "m.ckpt").string());
  if (!(ReadCheckpoint((dir / "m.ckpt").string()) == checkpoint)) {
    ok = false;
    failed += " checkpoint";
  }

  // Trials.
  TrialSet trials = MakeTrials(corpus, 6, 10, 3);
  WriteTrials(trials, (dir / "t.tsv").string());
  if (!(ReadTrials((dir / "t.tsv").string()) == trials)) {
    ok = false;
    failed += " trials";
  }

  // Scores.
  RngStream rng(9, 0);
  std::vector<double> scores;
  for (size_t i = 0; i < trials.size(); ++i)
    scores.push_back(rng.NextGaussian() * 1e2);
  WriteScores(trials, scores, "config: {}", (dir / "s.tsv").string());
  std::vector<ScoredTrial> rows = ReadScores((dir / "s.tsv").string());
  if (rows.size() != trials.size()) {
    ok = false;
    failed += " scores";
  } else {
    for (size_t i = 0; i < rows.size(); ++i)
      if (!(rows[i].trial == trials[i]) || rows[i].score != scores[i]) {
        ok = false;
        failed += " scores";
        break;
      }
  }

  Report(8, "file-format round-trips", ok,
         ok ? "corpus, checkpoint, trials, scores all exact"
            : "failed:" + failed);
}

}  // namespace

int main(int argc, char **argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    if (flag == "--cli") g_cli = argv[i + 1];
    if (flag == "--scratch") g_scratch = argv[i + 1];
  }
  if (g_scratch.empty()) g_scratch = fs::temp_directory_path() / "mtml_acceptance";
  fs::create_directories(g_scratch);

  try {
    Criterion1();
    Criterion2();
    Criterion3();
    Criterion4();
    Criteria5And6();
    Criterion7();
    Criterion8();
  } catch (const std::exception &e) {
    std::cout << "[FAIL] acceptance suite aborted: " << e.what() << "\n";
    return 99;
  }
  std::cout << (g_failures == 0 ? "all criteria passed\n"
                                : std::to_string(g_failures) +
                                      " criteria failed\n");
  return g_failures;
}
