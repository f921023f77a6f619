// tools/mtml_main.cc

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

// Command-line front door: gen-data, make-trials, train, eval, inspect-pairs.
// All commands are deterministic given config + seeds.  Exit codes: 0 ok,
// 2 config error, 3 numeric error, 4 I/O error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtml/common.h"
#include "mtml/config.h"
#include "mtml/eval.h"
#include "mtml/similarity.h"
#include "mtml/trainer.h"

namespace {

using namespace mtml;

void WriteTextFile(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

int RunGenData(const std::string &config_path, const std::string &split,
               const std::string &out_path) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  if (split != "train" && split != "eval")
    throw ConfigError("--split must be 'train' or 'eval'");
  bool is_train = split == "train";
  CorpusSpec spec = is_train ? config.TrainCorpusSpec() : config.EvalCorpusSpec();
  Corpus corpus = GenerateCorpus(spec, is_train ? Split::kTrain : Split::kEval);
  WriteCorpus(corpus, out_path);
  std::cout << "wrote " << split << " corpus: " << corpus.utterances.size()
            << " utterances, " << spec.n_speakers << " speakers -> " << out_path
            << "\n";
  return 0;
}

int RunMakeTrials(const std::string &config_path, const std::string &corpus_path,
                  const std::string &out_path) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  if (config.n_target_trials < 1 || config.n_nontarget_trials < 1)
    throw ConfigError("missing required field 'trials.n_target' / "
                      "'trials.n_nontarget'");
  Corpus corpus = ReadCorpus(corpus_path);
  TrialSet trials = MakeTrials(corpus, config.n_target_trials,
                               config.n_nontarget_trials, config.seed_trials);
  WriteTrials(trials, out_path);
  std::cout << "wrote " << trials.size() << " trials -> " << out_path << "\n";
  return 0;
}

int RunTrain(const std::string &config_path, const std::string &corpus_path,
             const std::string &out_path, const std::string &log_path,
             const std::string &resume_path, int64_t stop_step) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  Corpus corpus = ReadCorpus(corpus_path);

  TrainResult result;
  if (resume_path.empty()) {
    result = Train(corpus, config.embedder, config.batch, config.multitask,
                   config.train, stop_step);
  } else {
    Checkpoint resumed = ReadCheckpoint(resume_path);
    if (!resumed.state)
      throw ConfigError("checkpoint " + resume_path +
                        " carries no optimizer state, cannot resume");
    result = TrainFrom(corpus, resumed.params,
                       AdamState{resumed.state->adam_m, resumed.state->adam_v,
                                 resumed.state->step},
                       resumed.state->step, config.batch, config.multitask,
                       config.train, stop_step);
  }

  Checkpoint checkpoint;
  checkpoint.params = std::move(result.params);
  checkpoint.state = CheckpointState{result.adam.t, std::move(result.adam.m),
                                     std::move(result.adam.v)};
  WriteCheckpoint(checkpoint, out_path);
  std::string log_out = log_path.empty() ? out_path + ".log.tsv" : log_path;
  WriteTrainLog(result.log, "config: " + config.CanonicalJson(), log_out);
  std::cout << "trained " << result.log.size() << " steps -> " << out_path
            << " (log: " << log_out << ")\n";
  return 0;
}

int RunEval(const std::string &config_path, const std::string &checkpoint_path,
            const std::string &corpus_path, const std::string &trials_path,
            const std::string &report_path, std::string scores_path,
            std::string det_path, const std::string &train_corpus_path) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  Checkpoint checkpoint = ReadCheckpoint(checkpoint_path);
  Corpus corpus = ReadCorpus(corpus_path);
  TrialSet trials = ReadTrials(trials_path);
  if (scores_path.empty()) scores_path = report_path + ".scores.tsv";
  if (det_path.empty()) det_path = report_path + ".det.tsv";

  Matrix embeddings = EmbedUtterances(checkpoint.params, corpus.utterances);
  std::map<int32_t, std::vector<double>> by_utt;
  for (size_t i = 0; i < corpus.utterances.size(); ++i) {
    const double *row = embeddings.RowData(static_cast<int>(i));
    by_utt[corpus.utterances[i].utt_id] =
        std::vector<double>(row, row + embeddings.NumCols());
  }

  Backend backend = Backend::PassThrough(config.backend);
  if (config.backend.use_lda) {
    if (train_corpus_path.empty())
      throw ConfigError("backend.use_lda requires --train-corpus for fitting");
    Corpus train_corpus = ReadCorpus(train_corpus_path);
    Matrix train_embeddings =
        EmbedUtterances(checkpoint.params, train_corpus.utterances);
    std::vector<int32_t> labels;
    labels.reserve(train_corpus.utterances.size());
    for (const Utterance &utt : train_corpus.utterances)
      labels.push_back(utt.speaker_id);
    backend = Backend::Fit(train_embeddings, labels, config.backend);
  }

  ScoreReport report = EvaluateTrials(by_utt, trials, backend);

  const std::string echo = "config: " + config.CanonicalJson();
  WriteScores(trials, report.scores, echo, scores_path);
  WriteDetPoints(report.det, echo, det_path);
  nlohmann::json out;
  out["config"] = nlohmann::json::parse(config.CanonicalJson());
  out["eer"] = report.eer;
  out["dcf2"] = report.dcf2;
  out["dcf3"] = report.dcf3;
  out["num_trials"] = trials.size();
  WriteTextFile(report_path, out.dump(2) + "\n");
  std::cout << "eer=" << FormatDouble(report.eer)
            << " dcf2=" << FormatDouble(report.dcf2)
            << " dcf3=" << FormatDouble(report.dcf3) << " -> " << report_path
            << "\n";
  return 0;
}

int RunInspectPairs(const std::string &config_path,
                    const std::string &checkpoint_path,
                    const std::string &corpus_path, uint64_t batch_seed,
                    const std::string &out_path) {
  ExperimentConfig config = LoadExperimentConfig(config_path);
  Checkpoint checkpoint = ReadCheckpoint(checkpoint_path);
  Corpus corpus = ReadCorpus(corpus_path);

  RngStream rng(batch_seed, SubStream(kStreamBatchDraw, 0));
  Batch batch = SampleBatch(corpus, config.batch, &rng);
  ForwardTrace trace = Forward(checkpoint.params, batch);
  SimilarityMatrix sim = ComputeSimilarity(trace.embeddings,
                                           config.multitask.normalize_similarity);
  PairSelection selection =
      MinePairs(sim, batch.labels, config.multitask.mining);
  WeighPairs(sim, config.multitask.weighting, &selection);

  std::ostringstream out;
  out << "# config: " << config.CanonicalJson() << '\n';
  out << "anchor\tpartner\ttype\tsimilarity\tweight\n";
  auto emit = [&](int i, size_t a, bool positive) {
    const auto &partners =
        positive ? selection.positives[i] : selection.negatives[i];
    const auto &weights =
        positive ? selection.positive_weights[i] : selection.negative_weights[i];
    out << batch.utterances[i].utt_id << '\t'
        << batch.utterances[partners[a]].utt_id << '\t'
        << (positive ? "pos" : "neg") << '\t'
        << FormatDouble(sim.s(i, partners[a])) << '\t'
        << FormatDouble(weights[a]) << '\n';
  };
  for (int i = 0; i < static_cast<int>(batch.labels.size()); ++i) {
    for (size_t a = 0; a < selection.positives[i].size(); ++a) emit(i, a, true);
    for (size_t a = 0; a < selection.negatives[i].size(); ++a) emit(i, a, false);
  }
  WriteTextFile(out_path, out.str());
  std::cout << "wrote " << selection.NumPositives() << " positive and "
            << selection.NumNegatives() << " negative pairs -> " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"multi-task metric learning for speaker-verification embeddings"};
  app.require_subcommand(1);

  std::string config_path, out_path, corpus_path, split = "train";
  std::string checkpoint_path, trials_path, log_path, resume_path;
  std::string scores_path, det_path, train_corpus_path, report_path;
  uint64_t batch_seed = 0;
  int64_t stop_step = -1;

  CLI::App *gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  gen->add_option("--config", config_path, "experiment config JSON")->required();
  gen->add_option("--split", split, "train or eval");
  gen->add_option("--out", out_path, "output corpus path")->required();

  CLI::App *mk = app.add_subcommand("make-trials", "sample verification trials");
  mk->add_option("--config", config_path, "experiment config JSON")->required();
  mk->add_option("--corpus", corpus_path, "corpus to draw trials from")->required();
  mk->add_option("--out", out_path, "output trial list path")->required();

  CLI::App *tr = app.add_subcommand("train", "train the embedder");
  tr->add_option("--config", config_path, "experiment config JSON")->required();
  tr->add_option("--corpus", corpus_path, "training corpus")->required();
  tr->add_option("--out", out_path, "output checkpoint path")->required();
  tr->add_option("--log", log_path, "training log TSV (default: <out>.log.tsv)");
  tr->add_option("--resume", resume_path, "checkpoint to resume from");
  tr->add_option("--stop-step", stop_step,
                 "interrupt after this step (schedule still spans train.steps)");

  CLI::App *ev = app.add_subcommand("eval", "score trials and compute metrics");
  ev->add_option("--config", config_path, "experiment config JSON")->required();
  ev->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
  ev->add_option("--corpus", corpus_path, "evaluation corpus")->required();
  ev->add_option("--trials", trials_path, "trial list")->required();
  ev->add_option("--report", report_path, "output report JSON")->required();
  ev->add_option("--scores", scores_path, "scores TSV (default: <report>.scores.tsv)");
  ev->add_option("--det", det_path, "DET points TSV (default: <report>.det.tsv)");
  ev->add_option("--train-corpus", train_corpus_path,
                 "training corpus for LDA fitting (required with backend.use_lda)");

  CLI::App *ip = app.add_subcommand("inspect-pairs", "dump mined pairs with weights");
  ip->add_option("--config", config_path, "experiment config JSON")->required();
  ip->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
  ip->add_option("--corpus", corpus_path, "corpus to sample a batch from")->required();
  ip->add_option("--batch-seed", batch_seed, "seed for the inspected batch");
  ip->add_option("--out", out_path, "output TSV path")->required();

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return RunGenData(config_path, split, out_path);
    if (mk->parsed()) return RunMakeTrials(config_path, corpus_path, out_path);
    if (tr->parsed())
      return RunTrain(config_path, corpus_path, out_path, log_path, resume_path,
                      stop_step);
    if (ev->parsed())
      return RunEval(config_path, checkpoint_path, corpus_path, trials_path,
                     report_path, scores_path, det_path, train_corpus_path);
    if (ip->parsed())
      return RunInspectPairs(config_path, checkpoint_path, corpus_path,
                             batch_seed, out_path);
    return 2;
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const ConfigError &e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return 2;
  } catch (const NumericError &e) {
    std::cerr << "error[numeric]: " << e.what() << "\n";
    return 3;
  } catch (const IoError &e) {
    std::cerr << "error[io]: " << e.what() << "\n";
    return 4;
  }
}
