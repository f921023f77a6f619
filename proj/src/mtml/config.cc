// mtml/config.cc

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

#include "mtml/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtml/common.h"

namespace mtml {

namespace {

using nlohmann::json;

void RejectUnknownKeys(const json &object, const std::string &section,
                       const std::set<std::string> &allowed) {
  for (const auto &item : object.items())
    if (allowed.find(item.key()) == allowed.end())
      throw ConfigError("unknown key '" + section + item.key() + "'");
}

const json *Find(const json &object, const char *key) {
  auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

double GetDouble(const json &object, const std::string &section,
                 const char *key, double fallback) {
  const json *v = Find(object, key);
  if (v == nullptr) return fallback;
  if (!v->is_number())
    throw ConfigError("'" + section + key + "' must be a number");
  return v->get<double>();
}

int GetInt(const json &object, const std::string &section, const char *key,
           int fallback) {
  const json *v = Find(object, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer())
    throw ConfigError("'" + section + key + "' must be an integer");
  return v->get<int>();
}

int GetRequiredInt(const json &object, const std::string &section,
                   const char *key) {
  const json *v = Find(object, key);
  if (v == nullptr)
    throw ConfigError("missing required field '" + section + key + "'");
  if (!v->is_number_integer())
    throw ConfigError("'" + section + key + "' must be an integer");
  return v->get<int>();
}

uint64_t GetSeed(const json &object, const std::string &section,
                 const char *key, uint64_t fallback) {
  const json *v = Find(object, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer())
    throw ConfigError("'" + section + key + "' must be an integer");
  return v->get<uint64_t>();
}

bool GetBool(const json &object, const std::string &section, const char *key,
             bool fallback) {
  const json *v = Find(object, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean())
    throw ConfigError("'" + section + key + "' must be a boolean");
  return v->get<bool>();
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const std::string &json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  RejectUnknownKeys(root, "",
                    {"corpus", "batch", "embedder", "mining", "weighting",
                     "multitask", "train", "backend", "trials", "seeds"});

  ExperimentConfig config;

  const json *corpus = Find(root, "corpus");
  if (corpus == nullptr) throw ConfigError("missing required section 'corpus'");
  RejectUnknownKeys(*corpus, "corpus.",
                    {"feat_dim", "frames_min", "frames_max",
                     "between_speaker_std", "within_speaker_std", "train",
                     "eval"});
  config.feat_dim = GetInt(*corpus, "corpus.", "feat_dim", config.feat_dim);
  config.frames_min = GetInt(*corpus, "corpus.", "frames_min", config.frames_min);
  config.frames_max = GetInt(*corpus, "corpus.", "frames_max", config.frames_max);
  config.between_speaker_std = GetDouble(*corpus, "corpus.",
                                         "between_speaker_std",
                                         config.between_speaker_std);
  config.within_speaker_std = GetDouble(*corpus, "corpus.",
                                        "within_speaker_std",
                                        config.within_speaker_std);
  const json *train_split = Find(*corpus, "train");
  if (train_split == nullptr)
    throw ConfigError("missing required section 'corpus.train'");
  RejectUnknownKeys(*train_split, "corpus.train.",
                    {"n_speakers", "utts_per_speaker"});
  config.train_speakers =
      GetRequiredInt(*train_split, "corpus.train.", "n_speakers");
  config.train_utts_per_speaker =
      GetRequiredInt(*train_split, "corpus.train.", "utts_per_speaker");
  if (const json *eval_split = Find(*corpus, "eval")) {
    RejectUnknownKeys(*eval_split, "corpus.eval.",
                      {"n_speakers", "utts_per_speaker"});
    config.eval_speakers =
        GetRequiredInt(*eval_split, "corpus.eval.", "n_speakers");
    config.eval_utts_per_speaker =
        GetRequiredInt(*eval_split, "corpus.eval.", "utts_per_speaker");
  }

  if (const json *batch = Find(root, "batch")) {
    RejectUnknownKeys(*batch, "batch.", {"speakers_per_batch", "utts_per_speaker"});
    config.batch.speakers_per_batch =
        GetInt(*batch, "batch.", "speakers_per_batch",
               config.batch.speakers_per_batch);
    config.batch.utts_per_speaker = GetInt(
        *batch, "batch.", "utts_per_speaker", config.batch.utts_per_speaker);
  }

  if (const json *embedder = Find(root, "embedder")) {
    RejectUnknownKeys(*embedder, "embedder.", {"frame_layers", "embed_dim"});
    if (const json *layers = Find(*embedder, "frame_layers")) {
      if (!layers->is_array())
        throw ConfigError("'embedder.frame_layers' must be an array");
      config.embedder.frame_layers.clear();
      for (const auto &w : *layers) {
        if (!w.is_number_integer())
          throw ConfigError("'embedder.frame_layers' entries must be integers");
        config.embedder.frame_layers.push_back(w.get<int>());
      }
    }
    config.embedder.embed_dim =
        GetInt(*embedder, "embedder.", "embed_dim", config.embedder.embed_dim);
  }

  if (const json *mining = Find(root, "mining")) {
    RejectUnknownKeys(*mining, "mining.", {"margin", "positive_rule"});
    config.multitask.mining.margin =
        GetDouble(*mining, "mining.", "margin", config.multitask.mining.margin);
    if (const json *rule = Find(*mining, "positive_rule")) {
      if (!rule->is_string())
        throw ConfigError("'mining.positive_rule' must be a string");
      std::string name = rule->get<std::string>();
      if (name == "hard_positive") {
        config.multitask.mining.positive_rule = PositiveRule::kHardPositive;
      } else if (name == "literal_eq3") {
        config.multitask.mining.positive_rule = PositiveRule::kLiteralEq3;
      } else {
        throw ConfigError("'mining.positive_rule' must be 'hard_positive' or "
                          "'literal_eq3'");
      }
    }
  }

  if (const json *weighting = Find(root, "weighting")) {
    RejectUnknownKeys(*weighting, "weighting.", {"alpha", "beta", "lambda"});
    config.multitask.weighting.alpha = GetDouble(
        *weighting, "weighting.", "alpha", config.multitask.weighting.alpha);
    config.multitask.weighting.beta = GetDouble(
        *weighting, "weighting.", "beta", config.multitask.weighting.beta);
    config.multitask.weighting.lambda = GetDouble(
        *weighting, "weighting.", "lambda", config.multitask.weighting.lambda);
  }

  if (const json *multitask = Find(root, "multitask")) {
    RejectUnknownKeys(*multitask, "multitask.", {"eta", "normalize_similarity"});
    config.multitask.eta =
        GetDouble(*multitask, "multitask.", "eta", config.multitask.eta);
    config.multitask.normalize_similarity =
        GetBool(*multitask, "multitask.", "normalize_similarity",
                config.multitask.normalize_similarity);
  }

  if (const json *train = Find(root, "train")) {
    RejectUnknownKeys(*train, "train.",
                      {"steps", "lr_start", "lr_end", "adam_beta1",
                       "adam_beta2", "adam_eps", "weight_decay"});
    config.train.steps = GetInt(*train, "train.", "steps",
                                static_cast<int>(config.train.steps));
    config.train.lr_start =
        GetDouble(*train, "train.", "lr_start", config.train.lr_start);
    config.train.lr_end =
        GetDouble(*train, "train.", "lr_end", config.train.lr_end);
    config.train.adam_beta1 =
        GetDouble(*train, "train.", "adam_beta1", config.train.adam_beta1);
    config.train.adam_beta2 =
        GetDouble(*train, "train.", "adam_beta2", config.train.adam_beta2);
    config.train.adam_eps =
        GetDouble(*train, "train.", "adam_eps", config.train.adam_eps);
    config.train.weight_decay =
        GetDouble(*train, "train.", "weight_decay", config.train.weight_decay);
  }

  if (const json *backend = Find(root, "backend")) {
    RejectUnknownKeys(*backend, "backend.", {"use_lda", "lda_dim", "length_norm"});
    config.backend.use_lda =
        GetBool(*backend, "backend.", "use_lda", config.backend.use_lda);
    config.backend.lda_dim =
        GetInt(*backend, "backend.", "lda_dim", config.backend.lda_dim);
    config.backend.length_norm =
        GetBool(*backend, "backend.", "length_norm", config.backend.length_norm);
  }

  if (const json *trials = Find(root, "trials")) {
    RejectUnknownKeys(*trials, "trials.", {"n_target", "n_nontarget"});
    config.n_target_trials =
        GetInt(*trials, "trials.", "n_target", config.n_target_trials);
    config.n_nontarget_trials =
        GetInt(*trials, "trials.", "n_nontarget", config.n_nontarget_trials);
  }

  if (const json *seeds = Find(root, "seeds")) {
    RejectUnknownKeys(*seeds, "seeds.",
                      {"corpus_train", "corpus_eval", "train", "trials"});
    config.seed_corpus_train =
        GetSeed(*seeds, "seeds.", "corpus_train", config.seed_corpus_train);
    config.seed_corpus_eval =
        GetSeed(*seeds, "seeds.", "corpus_eval", config.seed_corpus_eval);
    config.seed_train = GetSeed(*seeds, "seeds.", "train", config.seed_train);
    config.seed_trials = GetSeed(*seeds, "seeds.", "trials", config.seed_trials);
  }
  config.train.seed = config.seed_train;

  // Cross-field checks that only make sense at the experiment level.
  if (!(config.multitask.eta >= 0.0 && config.multitask.eta <= 1.0))
    throw ConfigError("multitask.eta must lie in [0, 1]");
  Validate(config.batch);
  Validate(config.train);
  Validate(config.multitask.mining);
  Validate(config.multitask.weighting);
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return ParseExperimentConfig(buf.str());
}

CorpusSpec ExperimentConfig::TrainCorpusSpec() const {
  CorpusSpec spec;
  spec.n_speakers = train_speakers;
  spec.utts_per_speaker = train_utts_per_speaker;
  spec.feat_dim = feat_dim;
  spec.frames_min = frames_min;
  spec.frames_max = frames_max;
  spec.between_speaker_std = between_speaker_std;
  spec.within_speaker_std = within_speaker_std;
  spec.seed = seed_corpus_train;
  return spec;
}

CorpusSpec ExperimentConfig::EvalCorpusSpec() const {
  if (eval_speakers == 0)
    throw ConfigError("missing required section 'corpus.eval'");
  CorpusSpec spec;
  spec.n_speakers = eval_speakers;
  spec.utts_per_speaker = eval_utts_per_speaker;
  spec.feat_dim = feat_dim;
  spec.frames_min = frames_min;
  spec.frames_max = frames_max;
  spec.between_speaker_std = between_speaker_std;
  spec.within_speaker_std = within_speaker_std;
  spec.seed = seed_corpus_eval;
  return spec;
}

std::string ExperimentConfig::CanonicalJson() const {
  json root;
  root["corpus"]["feat_dim"] = feat_dim;
  root["corpus"]["frames_min"] = frames_min;
  root["corpus"]["frames_max"] = frames_max;
  root["corpus"]["between_speaker_std"] = between_speaker_std;
  root["corpus"]["within_speaker_std"] = within_speaker_std;
  root["corpus"]["train"]["n_speakers"] = train_speakers;
  root["corpus"]["train"]["utts_per_speaker"] = train_utts_per_speaker;
  if (eval_speakers > 0) {
    root["corpus"]["eval"]["n_speakers"] = eval_speakers;
    root["corpus"]["eval"]["utts_per_speaker"] = eval_utts_per_speaker;
  }
  root["batch"]["speakers_per_batch"] = batch.speakers_per_batch;
  root["batch"]["utts_per_speaker"] = batch.utts_per_speaker;
  root["embedder"]["frame_layers"] = embedder.frame_layers;
  root["embedder"]["embed_dim"] = embedder.embed_dim;
  root["mining"]["margin"] = multitask.mining.margin;
  root["mining"]["positive_rule"] =
      multitask.mining.positive_rule == PositiveRule::kHardPositive
          ? "hard_positive"
          : "literal_eq3";
  root["weighting"]["alpha"] = multitask.weighting.alpha;
  root["weighting"]["beta"] = multitask.weighting.beta;
  root["weighting"]["lambda"] = multitask.weighting.lambda;
  root["multitask"]["eta"] = multitask.eta;
  root["multitask"]["normalize_similarity"] = multitask.normalize_similarity;
  root["train"]["steps"] = train.steps;
  root["train"]["lr_start"] = train.lr_start;
  root["train"]["lr_end"] = train.lr_end;
  root["train"]["adam_beta1"] = train.adam_beta1;
  root["train"]["adam_beta2"] = train.adam_beta2;
  root["train"]["adam_eps"] = train.adam_eps;
  root["train"]["weight_decay"] = train.weight_decay;
  root["backend"]["use_lda"] = backend.use_lda;
  root["backend"]["lda_dim"] = backend.lda_dim;
  root["backend"]["length_norm"] = backend.length_norm;
  if (n_target_trials > 0 || n_nontarget_trials > 0) {
    root["trials"]["n_target"] = n_target_trials;
    root["trials"]["n_nontarget"] = n_nontarget_trials;
  }
  root["seeds"]["corpus_train"] = seed_corpus_train;
  root["seeds"]["corpus_eval"] = seed_corpus_eval;
  root["seeds"]["train"] = seed_train;
  root["seeds"]["trials"] = seed_trials;
  return root.dump();
}

}  // namespace mtml
