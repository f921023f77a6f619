// mtml/embedder.h

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

#ifndef MTML_EMBEDDER_H_
#define MTML_EMBEDDER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtml/matrix.h"
#include "mtml/sampler.h"

namespace mtml {

// A small differentiable network: per-frame affine+ReLU layers, statistics
// pooling (mean and std over frames), then two fully connected layers.  The
// first FC output, taken before its ReLU, is the speaker embedding; the
// second FC plus softmax gives class probabilities.
struct EmbedderConfig {
  int input_dim = 0;                        // per-frame feature dimension
  std::vector<int> frame_layers = {64, 64}; // may be empty (identity stack)
  int embed_dim = 16;
  int n_classes = 0;

  bool operator==(const EmbedderConfig &) const = default;
};

void Validate(const EmbedderConfig &config);

// Variance floor inside the pooling square root; keeps the std branch
// differentiable when all frames agree.
constexpr double kStdFloor = 1e-10;

// Offsets of each affine layer inside the flat parameter vector.
struct ParamLayout {
  struct Entry {
    int out = 0, in = 0;
    size_t weight_offset = 0, bias_offset = 0;
  };
  std::vector<Entry> frame;  // one per frame layer
  Entry fc1, fc2;
  size_t total = 0;
};

ParamLayout MakeLayout(const EmbedderConfig &config);

struct ModelParams {
  EmbedderConfig config;
  std::vector<double> flat;

  bool operator==(const ModelParams &) const = default;
};

// He-style fan-in scaled Gaussian weights, zero biases.
ModelParams InitParams(const EmbedderConfig &config, uint64_t seed);

struct ForwardTrace {
  int batch_size = 0;
  int num_frames = 0;
  std::vector<Matrix> frames;                  // D x (T x input_dim)
  std::vector<std::vector<Matrix>> layer_out;  // L x D x (T x width), post-ReLU
  Matrix pool_mean, pool_std;                  // D x W
  Matrix pooled;                               // D x 2W, [mean | std]
  Matrix embeddings;                           // D x embed_dim, FC1 pre-activation
  Matrix embeddings_relu;                      // D x embed_dim
  Matrix logits;                               // D x n_classes
  Matrix probabilities;                        // D x n_classes, rows sum to 1
};

ForwardTrace Forward(const ModelParams &params, const Batch &batch);
ForwardTrace ForwardFrames(const ModelParams &params,
                           const std::vector<Matrix> &frames);

// Gradient of sum(grad_embeddings . embeddings) + sum(grad_logits . logits)
// with respect to every parameter.  Either upstream gradient may be an empty
// matrix, meaning zero; the logit path flows back through FC2 and the FC1
// ReLU and joins the embedding path at the FC1 pre-activation.
std::vector<double> Backward(const ModelParams &params,
                             const ForwardTrace &trace,
                             const Matrix &grad_embeddings,
                             const Matrix &grad_logits);

// Statistics pooling over the rows of a T x W matrix, and its reverse-mode
// counterpart.  Exposed separately because the pooling derivative is the one
// piece of the chain worth checking in isolation.
void StatsPooling(const Matrix &frames, std::vector<double> *mean,
                  std::vector<double> *stddev);
Matrix StatsPoolingBackward(const Matrix &frames,
                            const std::vector<double> &mean,
                            const std::vector<double> &stddev,
                            const std::vector<double> &grad_mean,
                            const std::vector<double> &grad_stddev);

// Embeds utterances one at a time (each may have its own length).
// Row i of the result is the embedding of utterances[i].
Matrix EmbedUtterances(const ModelParams &params,
                       const std::vector<Utterance> &utterances);

// Optimizer state carried inside a checkpoint so training can resume
// mid-run with bit-identical results.
struct CheckpointState {
  int64_t step = 0;
  std::vector<double> adam_m, adam_v;

  bool operator==(const CheckpointState &) const = default;
};

struct Checkpoint {
  ModelParams params;
  std::optional<CheckpointState> state;

  bool operator==(const Checkpoint &) const = default;
};

// MTCK container: text header (magic+version, config echo, optional state
// marker, parameter count) followed by little-endian f64 blobs and a
// trailing CRC32.  Round-trips are bit-exact.
void WriteCheckpoint(const Checkpoint &checkpoint, const std::string &path);
Checkpoint ReadCheckpoint(const std::string &path);

}  // namespace mtml

#endif  // MTML_EMBEDDER_H_
