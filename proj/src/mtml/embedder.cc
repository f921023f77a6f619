// mtml/embedder.cc

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

#include "mtml/embedder.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mtml/common.h"

namespace mtml {

void Validate(const EmbedderConfig &config) {
  if (config.input_dim < 1)
    throw ConfigError("embedder.input_dim must be >= 1");
  for (size_t i = 0; i < config.frame_layers.size(); ++i)
    if (config.frame_layers[i] < 1)
      throw ConfigError("embedder.frame_layers[" + std::to_string(i) +
                        "] must be >= 1");
  if (config.embed_dim < 2) throw ConfigError("embedder.embed_dim must be >= 2");
  if (config.n_classes < 2) throw ConfigError("embedder.n_classes must be >= 2");
}

ParamLayout MakeLayout(const EmbedderConfig &config) {
  Validate(config);
  ParamLayout layout;
  size_t offset = 0;
  auto add = [&offset](int out, int in) {
    ParamLayout::Entry e;
    e.out = out;
    e.in = in;
    e.weight_offset = offset;
    offset += static_cast<size_t>(out) * in;
    e.bias_offset = offset;
    offset += static_cast<size_t>(out);
    return e;
  };
  int width = config.input_dim;
  for (int w : config.frame_layers) {
    layout.frame.push_back(add(w, width));
    width = w;
  }
  layout.fc1 = add(config.embed_dim, 2 * width);
  layout.fc2 = add(config.n_classes, config.embed_dim);
  layout.total = offset;
  return layout;
}

ModelParams InitParams(const EmbedderConfig &config, uint64_t seed) {
  ParamLayout layout = MakeLayout(config);
  ModelParams params;
  params.config = config;
  params.flat.assign(layout.total, 0.0);
  RngStream rng(seed, SubStream(kStreamParamInit, 0));
  auto init_entry = [&](const ParamLayout::Entry &e) {
    double scale = std::sqrt(2.0 / e.in);
    for (size_t i = 0; i < static_cast<size_t>(e.out) * e.in; ++i)
      params.flat[e.weight_offset + i] = scale * rng.NextGaussian();
    // biases stay zero
  };
  for (const auto &e : layout.frame) init_entry(e);
  init_entry(layout.fc1);
  init_entry(layout.fc2);
  return params;
}

namespace {

// y = W x + b for one affine entry; W is out x in, row-major in flat.
void AffineForward(const std::vector<double> &flat,
                   const ParamLayout::Entry &e, const double *x, double *y) {
  for (int o = 0; o < e.out; ++o) {
    const double *wrow = flat.data() + e.weight_offset +
                         static_cast<size_t>(o) * e.in;
    double sum = flat[e.bias_offset + o];
    for (int i = 0; i < e.in; ++i) sum += wrow[i] * x[i];
    y[o] = sum;
  }
}

// Given g = dL/dy accumulates dW, db and returns dL/dx.
void AffineBackward(const std::vector<double> &flat,
                    const ParamLayout::Entry &e, const double *x,
                    const double *g, std::vector<double> *grad_flat,
                    double *grad_x) {
  for (int o = 0; o < e.out; ++o) {
    double go = g[o];
    double *gw = grad_flat->data() + e.weight_offset +
                 static_cast<size_t>(o) * e.in;
    for (int i = 0; i < e.in; ++i) gw[i] += go * x[i];
    (*grad_flat)[e.bias_offset + o] += go;
  }
  if (grad_x != nullptr) {
    for (int i = 0; i < e.in; ++i) grad_x[i] = 0.0;
    for (int o = 0; o < e.out; ++o) {
      double go = g[o];
      const double *wrow = flat.data() + e.weight_offset +
                           static_cast<size_t>(o) * e.in;
      for (int i = 0; i < e.in; ++i) grad_x[i] += go * wrow[i];
    }
  }
}

}  // namespace

void StatsPooling(const Matrix &frames, std::vector<double> *mean,
                  std::vector<double> *stddev) {
  const int t_count = frames.NumRows(), width = frames.NumCols();
  mean->assign(width, 0.0);
  stddev->assign(width, 0.0);
  for (int t = 0; t < t_count; ++t) {
    const double *row = frames.RowData(t);
    for (int d = 0; d < width; ++d) (*mean)[d] += row[d];
  }
  for (int d = 0; d < width; ++d) (*mean)[d] /= t_count;
  for (int t = 0; t < t_count; ++t) {
    const double *row = frames.RowData(t);
    for (int d = 0; d < width; ++d) {
      double diff = row[d] - (*mean)[d];
      (*stddev)[d] += diff * diff;
    }
  }
  for (int d = 0; d < width; ++d)
    (*stddev)[d] = std::sqrt((*stddev)[d] / t_count + kStdFloor);
}

Matrix StatsPoolingBackward(const Matrix &frames,
                            const std::vector<double> &mean,
                            const std::vector<double> &stddev,
                            const std::vector<double> &grad_mean,
                            const std::vector<double> &grad_stddev) {
  const int t_count = frames.NumRows(), width = frames.NumCols();
  Matrix grad(t_count, width);
  for (int t = 0; t < t_count; ++t) {
    const double *row = frames.RowData(t);
    double *grow = grad.RowData(t);
    for (int d = 0; d < width; ++d) {
      // d std/d h_td = (h_td - mean_d) / (T * std_d), mean terms cancel.
      grow[d] = grad_mean[d] / t_count +
                grad_stddev[d] * (row[d] - mean[d]) / (t_count * stddev[d]);
    }
  }
  return grad;
}

ForwardTrace ForwardFrames(const ModelParams &params,
                           const std::vector<Matrix> &frames) {
  const EmbedderConfig &config = params.config;
  ParamLayout layout = MakeLayout(config);
  if (params.flat.size() != layout.total)
    throw ConfigError("params: flat size " + std::to_string(params.flat.size()) +
                      " does not match layout " + std::to_string(layout.total));
  const int batch = static_cast<int>(frames.size());
  if (batch == 0) throw ConfigError("forward: empty batch");
  const int t_count = frames[0].NumRows();
  for (const Matrix &f : frames) {
    if (f.NumCols() != config.input_dim)
      throw ConfigError("forward: frame dim " + std::to_string(f.NumCols()) +
                        " != input_dim " + std::to_string(config.input_dim));
    if (f.NumRows() != t_count)
      throw ConfigError("forward: utterances have different frame counts");
    CheckFinite(f, "input frames");
  }

  ForwardTrace trace;
  trace.batch_size = batch;
  trace.num_frames = t_count;
  trace.frames = frames;
  trace.layer_out.resize(layout.frame.size());

  const int last_width = config.frame_layers.empty() ? config.input_dim
                                                     : config.frame_layers.back();
  trace.pool_mean = Matrix(batch, last_width);
  trace.pool_std = Matrix(batch, last_width);
  trace.pooled = Matrix(batch, 2 * last_width);
  trace.embeddings = Matrix(batch, config.embed_dim);
  trace.embeddings_relu = Matrix(batch, config.embed_dim);
  trace.logits = Matrix(batch, config.n_classes);
  trace.probabilities = Matrix(batch, config.n_classes);
  for (size_t l = 0; l < layout.frame.size(); ++l)
    trace.layer_out[l].resize(batch);

  for (int i = 0; i < batch; ++i) {
    const Matrix *current = &trace.frames[i];
    for (size_t l = 0; l < layout.frame.size(); ++l) {
      const ParamLayout::Entry &e = layout.frame[l];
      Matrix out(t_count, e.out);
      for (int t = 0; t < t_count; ++t) {
        AffineForward(params.flat, e, current->RowData(t), out.RowData(t));
        double *row = out.RowData(t);
        for (int o = 0; o < e.out; ++o) row[o] = row[o] > 0.0 ? row[o] : 0.0;
      }
      if (!AllFinite(out))
        throw NumericError("frame layer " + std::to_string(l) +
                           " produced non-finite values");
      trace.layer_out[l][i] = std::move(out);
      current = &trace.layer_out[l][i];
    }

    std::vector<double> mean, stddev;
    StatsPooling(*current, &mean, &stddev);
    for (int d = 0; d < last_width; ++d) {
      trace.pool_mean(i, d) = mean[d];
      trace.pool_std(i, d) = stddev[d];
      trace.pooled(i, d) = mean[d];
      trace.pooled(i, last_width + d) = stddev[d];
    }

    AffineForward(params.flat, layout.fc1, trace.pooled.RowData(i),
                  trace.embeddings.RowData(i));
    for (int d = 0; d < config.embed_dim; ++d) {
      double v = trace.embeddings(i, d);
      trace.embeddings_relu(i, d) = v > 0.0 ? v : 0.0;
    }
    AffineForward(params.flat, layout.fc2, trace.embeddings_relu.RowData(i),
                  trace.logits.RowData(i));

    const double *logit_row = trace.logits.RowData(i);
    double max_logit = logit_row[0];
    for (int c = 1; c < config.n_classes; ++c)
      max_logit = std::max(max_logit, logit_row[c]);
    double denom = 0.0;
    for (int c = 0; c < config.n_classes; ++c) {
      double e = std::exp(logit_row[c] - max_logit);
      trace.probabilities(i, c) = e;
      denom += e;
    }
    for (int c = 0; c < config.n_classes; ++c) trace.probabilities(i, c) /= denom;
  }
  CheckFinite(trace.pooled, "statistics pooling");
  CheckFinite(trace.embeddings, "fc1");
  CheckFinite(trace.logits, "fc2");
  CheckFinite(trace.probabilities, "softmax");
  return trace;
}

ForwardTrace Forward(const ModelParams &params, const Batch &batch) {
  std::vector<Matrix> frames;
  frames.reserve(batch.utterances.size());
  for (const Utterance &utt : batch.utterances) frames.push_back(utt.frames);
  return ForwardFrames(params, frames);
}

std::vector<double> Backward(const ModelParams &params,
                             const ForwardTrace &trace,
                             const Matrix &grad_embeddings,
                             const Matrix &grad_logits) {
  const EmbedderConfig &config = params.config;
  ParamLayout layout = MakeLayout(config);
  const int batch = trace.batch_size;
  const int t_count = trace.num_frames;
  const int last_width = config.frame_layers.empty() ? config.input_dim
                                                     : config.frame_layers.back();

  if (!grad_embeddings.Empty() &&
      (grad_embeddings.NumRows() != batch ||
       grad_embeddings.NumCols() != config.embed_dim))
    throw ConfigError("backward: grad_embeddings shape mismatch");
  if (!grad_logits.Empty() && (grad_logits.NumRows() != batch ||
                               grad_logits.NumCols() != config.n_classes))
    throw ConfigError("backward: grad_logits shape mismatch");
  if (!AllFinite(grad_embeddings) || !AllFinite(grad_logits))
    throw NumericError("backward: non-finite upstream gradient");

  std::vector<double> grad_flat(layout.total, 0.0);
  std::vector<double> g_embed(config.embed_dim);
  std::vector<double> g_pooled(2 * last_width);
  std::vector<double> grad_mean(last_width), grad_stddev(last_width);

  for (int i = 0; i < batch; ++i) {
    // Logit path: FC2, then the FC1 ReLU.
    std::fill(g_embed.begin(), g_embed.end(), 0.0);
    if (!grad_logits.Empty()) {
      std::vector<double> g_relu(config.embed_dim);
      AffineBackward(params.flat, layout.fc2, trace.embeddings_relu.RowData(i),
                     grad_logits.RowData(i), &grad_flat, g_relu.data());
      for (int d = 0; d < config.embed_dim; ++d)
        g_embed[d] = trace.embeddings(i, d) > 0.0 ? g_relu[d] : 0.0;
    }
    // Embedding path joins at the FC1 pre-activation.
    if (!grad_embeddings.Empty())
      for (int d = 0; d < config.embed_dim; ++d)
        g_embed[d] += grad_embeddings(i, d);

    AffineBackward(params.flat, layout.fc1, trace.pooled.RowData(i),
                   g_embed.data(), &grad_flat, g_pooled.data());

    for (int d = 0; d < last_width; ++d) {
      grad_mean[d] = g_pooled[d];
      grad_stddev[d] = g_pooled[last_width + d];
    }
    const Matrix &last_out = config.frame_layers.empty()
                                 ? trace.frames[i]
                                 : trace.layer_out.back()[i];
    std::vector<double> mean(last_width), stddev(last_width);
    for (int d = 0; d < last_width; ++d) {
      mean[d] = trace.pool_mean(i, d);
      stddev[d] = trace.pool_std(i, d);
    }
    Matrix g_frames =
        StatsPoolingBackward(last_out, mean, stddev, grad_mean, grad_stddev);

    // Frame stack, last layer to first.  ReLU mask comes from the stored
    // post-activation output (positive iff the pre-activation was).
    for (int l = static_cast<int>(layout.frame.size()) - 1; l >= 0; --l) {
      const ParamLayout::Entry &e = layout.frame[l];
      const Matrix &layer_input =
          l == 0 ? trace.frames[i] : trace.layer_out[l - 1][i];
      Matrix g_input(t_count, e.in);
      std::vector<double> g_z(e.out);
      for (int t = 0; t < t_count; ++t) {
        const double *out_row = trace.layer_out[l][i].RowData(t);
        const double *g_row = g_frames.RowData(t);
        for (int o = 0; o < e.out; ++o)
          g_z[o] = out_row[o] > 0.0 ? g_row[o] : 0.0;
        AffineBackward(params.flat, e, layer_input.RowData(t), g_z.data(),
                       &grad_flat, g_input.RowData(t));
      }
      g_frames = std::move(g_input);
    }
  }
  return grad_flat;
}

Matrix EmbedUtterances(const ModelParams &params,
                       const std::vector<Utterance> &utterances) {
  Matrix embeddings(static_cast<int>(utterances.size()),
                    params.config.embed_dim);
  for (size_t i = 0; i < utterances.size(); ++i) {
    ForwardTrace trace = ForwardFrames(params, {utterances[i].frames});
    for (int d = 0; d < params.config.embed_dim; ++d)
      embeddings(static_cast<int>(i), d) = trace.embeddings(0, d);
  }
  return embeddings;
}

// ---------------------------------------------------------------------------
// MTCK checkpoint container
// ---------------------------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[] = "MTCK";

uint32_t Crc32(const uint8_t *data, size_t len) {
  static uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  uint32_t crc = 0xffffffffu;
  for (size_t i = 0; i < len; ++i)
    crc = table[(crc ^ data[i]) & 0xffu] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

void AppendU32Le(std::string *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void AppendF64Le(std::string *out, double d) {
  uint64_t v;
  std::memcpy(&v, &d, 8);
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void AppendBlob(std::string *out, const std::vector<double> &blob) {
  for (double d : blob) AppendF64Le(out, d);
}

}  // namespace

void WriteCheckpoint(const Checkpoint &checkpoint, const std::string &path) {
  const ModelParams &params = checkpoint.params;
  ParamLayout layout = MakeLayout(params.config);
  if (params.flat.size() != layout.total)
    throw ConfigError("checkpoint: parameter vector does not match config");
  if (checkpoint.state &&
      (checkpoint.state->adam_m.size() != layout.total ||
       checkpoint.state->adam_v.size() != layout.total))
    throw ConfigError("checkpoint: optimizer state does not match config");

  std::string bytes;
  bytes += std::string(kCheckpointMagic) + " 1\n";
  {
    std::ostringstream h;
    h << "config " << params.config.input_dim << ' ' << params.config.embed_dim
      << ' ' << params.config.n_classes << ' ' << params.config.frame_layers.size();
    for (int w : params.config.frame_layers) h << ' ' << w;
    h << '\n';
    h << "state " << (checkpoint.state ? 1 : 0) << ' '
      << (checkpoint.state ? checkpoint.state->step : 0) << '\n';
    h << "params " << params.flat.size() << '\n';
    bytes += h.str();
  }
  AppendBlob(&bytes, params.flat);
  if (checkpoint.state) {
    AppendBlob(&bytes, checkpoint.state->adam_m);
    AppendBlob(&bytes, checkpoint.state->adam_v);
  }
  AppendU32Le(&bytes, Crc32(reinterpret_cast<const uint8_t *>(bytes.data()),
                            bytes.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

Checkpoint ReadCheckpoint(const std::string &path) {
  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path);
    bytes = buf.str();
  }
  if (bytes.size() < 4 || bytes.compare(0, 4, kCheckpointMagic) != 0)
    throw ParseError(path + ": bad magic, expected MTCK", 0);

  uint64_t offset = 0;
  auto read_line = [&](const char *what) {
    size_t end = bytes.find('\n', offset);
    if (end == std::string::npos)
      throw ParseError(path + ": unterminated " + std::string(what), offset);
    std::string line = bytes.substr(offset, end - offset);
    offset = end + 1;
    return line;
  };
  if (read_line("magic line") != "MTCK 1")
    throw ParseError(path + ": unsupported version", 0);

  Checkpoint checkpoint;
  uint64_t config_offset = offset;
  {
    std::istringstream s(read_line("config line"));
    std::string tag;
    size_t n_layers = 0;
    EmbedderConfig &c = checkpoint.params.config;
    s >> tag >> c.input_dim >> c.embed_dim >> c.n_classes >> n_layers;
    if (!s || tag != "config")
      throw ParseError(path + ": malformed config line", config_offset);
    c.frame_layers.clear();
    for (size_t i = 0; i < n_layers; ++i) {
      int w;
      s >> w;
      if (!s) throw ParseError(path + ": malformed config line", config_offset);
      c.frame_layers.push_back(w);
    }
  }
  Validate(checkpoint.params.config);

  bool has_state = false;
  int64_t step = 0;
  {
    uint64_t state_offset = offset;
    std::istringstream s(read_line("state line"));
    std::string tag;
    int flag;
    s >> tag >> flag >> step;
    if (!s || tag != "state" || (flag != 0 && flag != 1))
      throw ParseError(path + ": malformed state line", state_offset);
    has_state = flag == 1;
  }
  size_t n_params = 0;
  {
    uint64_t count_offset = offset;
    std::istringstream s(read_line("params line"));
    std::string tag;
    s >> tag >> n_params;
    if (!s || tag != "params")
      throw ParseError(path + ": malformed params line", count_offset);
  }
  ParamLayout layout = MakeLayout(checkpoint.params.config);
  if (n_params != layout.total)
    throw ParseError(path + ": parameter count disagrees with config", offset);

  auto read_blob = [&](size_t count, std::vector<double> *blob) {
    if (offset + count * 8 > bytes.size())
      throw ParseError(path + ": truncated parameter blob", offset);
    blob->resize(count);
    for (size_t i = 0; i < count; ++i) {
      uint64_t v = 0;
      for (int b = 0; b < 8; ++b)
        v |= static_cast<uint64_t>(
                 static_cast<uint8_t>(bytes[offset + i * 8 + b]))
             << (8 * b);
      double d;
      std::memcpy(&d, &v, 8);
      (*blob)[i] = d;
    }
    offset += count * 8;
  };
  read_blob(n_params, &checkpoint.params.flat);
  if (has_state) {
    CheckpointState state;
    state.step = step;
    read_blob(n_params, &state.adam_m);
    read_blob(n_params, &state.adam_v);
    checkpoint.state = std::move(state);
  }

  if (offset + 4 > bytes.size())
    throw ParseError(path + ": truncated checksum", offset);
  uint32_t stored = 0;
  for (int b = 0; b < 4; ++b)
    stored |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[offset + b]))
              << (8 * b);
  uint32_t actual = Crc32(reinterpret_cast<const uint8_t *>(bytes.data()),
                          static_cast<size_t>(offset));
  if (stored != actual) throw ParseError(path + ": checksum mismatch", offset);
  offset += 4;
  if (offset != bytes.size())
    throw ParseError(path + ": trailing bytes after checksum", offset);
  return checkpoint;
}

}  // namespace mtml
