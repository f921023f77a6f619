// mtml/datagen.cc

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

#include "mtml/datagen.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "mtml/common.h"

namespace mtml {

void Validate(const CorpusSpec &spec) {
  if (spec.n_speakers < 2)
    throw ConfigError("corpus.n_speakers must be >= 2");
  if (spec.utts_per_speaker < 2)
    throw ConfigError("corpus.utts_per_speaker must be >= 2");
  if (spec.feat_dim < 1) throw ConfigError("corpus.feat_dim must be >= 1");
  if (spec.frames_min < 1) throw ConfigError("corpus.frames_min must be >= 1");
  if (spec.frames_min > spec.frames_max)
    throw ConfigError("corpus.frames_min must be <= corpus.frames_max");
  if (!(spec.between_speaker_std > 0.0))
    throw ConfigError("corpus.between_speaker_std must be > 0");
  if (!(spec.within_speaker_std >= 0.0))
    throw ConfigError("corpus.within_speaker_std must be >= 0");
}

namespace {

inline double QuantizeF32(double x) {
  return static_cast<double>(static_cast<float>(x));
}

}  // namespace

Corpus GenerateCorpus(const CorpusSpec &spec, Split split) {
  Validate(spec);

  RngStream mix_rng(spec.seed, SubStream(kStreamCorpusMixing, 0));
  Matrix mixing = RandomOrthogonal(spec.feat_dim, &mix_rng);

  RngStream mean_rng(spec.seed, SubStream(kStreamCorpusMeans, 0));
  Matrix means(spec.n_speakers, spec.feat_dim);
  for (int s = 0; s < spec.n_speakers; ++s)
    for (int d = 0; d < spec.feat_dim; ++d)
      means(s, d) = spec.between_speaker_std * mean_rng.NextGaussian();

  RngStream frame_rng(spec.seed, SubStream(kStreamCorpusFrames, 0));
  Corpus corpus;
  corpus.spec = spec;
  corpus.split = split;
  corpus.utterances.reserve(static_cast<size_t>(spec.n_speakers) *
                            spec.utts_per_speaker);

  std::vector<double> squashed(spec.feat_dim);
  int32_t utt_id = 0;
  for (int s = 0; s < spec.n_speakers; ++s) {
    for (int u = 0; u < spec.utts_per_speaker; ++u) {
      int frames = spec.frames_min +
                   static_cast<int>(frame_rng.UniformInt(
                       static_cast<uint64_t>(spec.frames_max - spec.frames_min) + 1));
      Utterance utt;
      utt.speaker_id = s;
      utt.utt_id = utt_id++;
      utt.frames = Matrix(frames, spec.feat_dim);
      for (int t = 0; t < frames; ++t) {
        for (int d = 0; d < spec.feat_dim; ++d) {
          double raw = means(s, d) +
                       spec.within_speaker_std * frame_rng.NextGaussian();
          squashed[d] = std::tanh(raw);
        }
        // Mix across dimensions so no single coordinate carries the label.
        for (int d = 0; d < spec.feat_dim; ++d) {
          double sum = 0.0;
          for (int k = 0; k < spec.feat_dim; ++k)
            sum += mixing(d, k) * squashed[k];
          utt.frames(t, d) = QuantizeF32(sum);
        }
      }
      corpus.utterances.push_back(std::move(utt));
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// SVC1 container
// ---------------------------------------------------------------------------

namespace {

constexpr char kCorpusMagic[] = "SVC1";

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
  char b[4];
  b[0] = static_cast<char>(v & 0xff);
  b[1] = static_cast<char>((v >> 8) & 0xff);
  b[2] = static_cast<char>((v >> 16) & 0xff);
  b[3] = static_cast<char>((v >> 24) & 0xff);
  out->append(b, 4);
}

void AppendF32Le(std::string *out, float f) {
  uint32_t v;
  std::memcpy(&v, &f, 4);
  AppendU32Le(out, v);
}

class ByteReader {
 public:
  ByteReader(const std::string &data, const std::string &path)
      : data_(data), path_(path) {}

  uint64_t Offset() const { return offset_; }

  void Require(size_t n, const char *what) {
    if (offset_ + n > data_.size())
      throw ParseError(path_ + ": truncated " + what, offset_);
  }

  uint32_t ReadU32Le(const char *what) {
    Require(4, what);
    const uint8_t *p = reinterpret_cast<const uint8_t *>(data_.data()) + offset_;
    offset_ += 4;
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) |
           (static_cast<uint32_t>(p[3]) << 24);
  }

  float ReadF32Le(const char *what) {
    uint32_t v = ReadU32Le(what);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
  }

  // Reads up to (and consuming) the next '\n'.
  std::string ReadLine(const char *what) {
    size_t end = data_.find('\n', offset_);
    if (end == std::string::npos)
      throw ParseError(path_ + ": unterminated " + std::string(what), offset_);
    std::string line = data_.substr(offset_, end - offset_);
    offset_ = end + 1;
    return line;
  }

 private:
  const std::string &data_;
  std::string path_;
  uint64_t offset_ = 0;
};

std::string ReadFileBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return buf.str();
}

void WriteFileBytes(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace

void WriteCorpus(const Corpus &corpus, const std::string &path) {
  Validate(corpus.spec);
  std::string bytes;
  bytes += std::string(kCorpusMagic) + " 1\n";
  {
    std::ostringstream h;
    h << "spec " << corpus.spec.n_speakers << ' ' << corpus.spec.utts_per_speaker
      << ' ' << corpus.spec.feat_dim << ' ' << corpus.spec.frames_min << ' '
      << corpus.spec.frames_max << ' '
      << FormatDouble(corpus.spec.between_speaker_std) << ' '
      << FormatDouble(corpus.spec.within_speaker_std) << ' ' << corpus.spec.seed
      << ' ' << (corpus.split == Split::kTrain ? "train" : "eval") << '\n';
    bytes += h.str();
  }
  bytes += "utts " + std::to_string(corpus.utterances.size()) + "\n";
  for (const Utterance &utt : corpus.utterances) {
    AppendU32Le(&bytes, static_cast<uint32_t>(utt.speaker_id));
    AppendU32Le(&bytes, static_cast<uint32_t>(utt.utt_id));
    AppendU32Le(&bytes, static_cast<uint32_t>(utt.frames.NumRows()));
    for (int t = 0; t < utt.frames.NumRows(); ++t)
      for (int d = 0; d < utt.frames.NumCols(); ++d)
        AppendF32Le(&bytes, static_cast<float>(utt.frames(t, d)));
  }
  AppendU32Le(&bytes, Crc32(reinterpret_cast<const uint8_t *>(bytes.data()),
                            bytes.size()));
  WriteFileBytes(path, bytes);
}

Corpus ReadCorpus(const std::string &path) {
  const std::string bytes = ReadFileBytes(path);
  if (bytes.size() < 4 || bytes.compare(0, 4, kCorpusMagic) != 0)
    throw ParseError(path + ": bad magic, expected SVC1", 0);

  if (bytes.size() < 4 + 4)
    throw ParseError(path + ": truncated trailer", bytes.size());
  ByteReader reader(bytes, path);

  std::string magic_line = reader.ReadLine("magic line");
  if (magic_line != "SVC1 1")
    throw ParseError(path + ": unsupported version in '" + magic_line + "'", 0);

  uint64_t spec_offset = reader.Offset();
  std::string spec_line = reader.ReadLine("spec line");
  Corpus corpus;
  {
    std::istringstream s(spec_line);
    std::string tag, split;
    s >> tag >> corpus.spec.n_speakers >> corpus.spec.utts_per_speaker >>
        corpus.spec.feat_dim >> corpus.spec.frames_min >>
        corpus.spec.frames_max >> corpus.spec.between_speaker_std >>
        corpus.spec.within_speaker_std >> corpus.spec.seed >> split;
    if (!s || tag != "spec")
      throw ParseError(path + ": malformed spec line", spec_offset);
    if (split == "train") {
      corpus.split = Split::kTrain;
    } else if (split == "eval") {
      corpus.split = Split::kEval;
    } else {
      throw ParseError(path + ": unknown split '" + split + "'", spec_offset);
    }
  }
  Validate(corpus.spec);

  uint64_t count_offset = reader.Offset();
  std::string count_line = reader.ReadLine("count line");
  size_t n_utts = 0;
  {
    std::istringstream s(count_line);
    std::string tag;
    s >> tag >> n_utts;
    if (!s || tag != "utts")
      throw ParseError(path + ": malformed utterance count line", count_offset);
  }

  corpus.utterances.reserve(n_utts);
  for (size_t i = 0; i < n_utts; ++i) {
    Utterance utt;
    utt.speaker_id = static_cast<int32_t>(reader.ReadU32Le("utterance record"));
    utt.utt_id = static_cast<int32_t>(reader.ReadU32Le("utterance record"));
    uint32_t frames = reader.ReadU32Le("utterance record");
    if (frames < static_cast<uint32_t>(corpus.spec.frames_min) ||
        frames > static_cast<uint32_t>(corpus.spec.frames_max))
      throw ParseError(path + ": frame count " + std::to_string(frames) +
                           " outside header range",
                       reader.Offset() - 4);
    utt.frames = Matrix(static_cast<int>(frames), corpus.spec.feat_dim);
    for (uint32_t t = 0; t < frames; ++t)
      for (int d = 0; d < corpus.spec.feat_dim; ++d)
        utt.frames(static_cast<int>(t), d) =
            static_cast<double>(reader.ReadF32Le("frame data"));
    corpus.utterances.push_back(std::move(utt));
  }

  uint64_t crc_offset = reader.Offset();
  uint32_t stored_crc = reader.ReadU32Le("checksum");
  uint32_t actual_crc = Crc32(reinterpret_cast<const uint8_t *>(bytes.data()),
                              static_cast<size_t>(crc_offset));
  if (stored_crc != actual_crc)
    throw ParseError(path + ": checksum mismatch", crc_offset);
  if (reader.Offset() != bytes.size())
    throw ParseError(path + ": trailing bytes after checksum", reader.Offset());
  return corpus;
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

TrialSet MakeTrials(const Corpus &corpus, int n_target, int n_nontarget,
                    uint64_t seed) {
  if (n_target < 1 || n_nontarget < 1)
    throw ConfigError("trials: n_target and n_nontarget must be >= 1");
  std::map<int32_t, std::vector<int32_t>> utts_by_speaker;
  for (const Utterance &utt : corpus.utterances)
    utts_by_speaker[utt.speaker_id].push_back(utt.utt_id);
  if (utts_by_speaker.size() < 2)
    throw ConfigError("trials: corpus must have >= 2 speakers");
  for (const auto &[spk, utts] : utts_by_speaker)
    if (utts.size() < 2)
      throw ConfigError("trials: speaker " + std::to_string(spk) +
                        " has < 2 utterances");

  std::vector<std::pair<int32_t, int32_t>> same_pairs, cross_pairs;
  const auto &all = corpus.utterances;
  for (size_t a = 0; a < all.size(); ++a) {
    for (size_t b = a + 1; b < all.size(); ++b) {
      int32_t lo = std::min(all[a].utt_id, all[b].utt_id);
      int32_t hi = std::max(all[a].utt_id, all[b].utt_id);
      if (all[a].speaker_id == all[b].speaker_id)
        same_pairs.emplace_back(lo, hi);
      else
        cross_pairs.emplace_back(lo, hi);
    }
  }
  if (static_cast<size_t>(n_target) > same_pairs.size())
    throw ConfigError("trials: n_target=" + std::to_string(n_target) +
                      " exceeds " + std::to_string(same_pairs.size()) +
                      " available same-speaker pairs");
  if (static_cast<size_t>(n_nontarget) > cross_pairs.size())
    throw ConfigError("trials: n_nontarget=" + std::to_string(n_nontarget) +
                      " exceeds " + std::to_string(cross_pairs.size()) +
                      " available cross-speaker pairs");

  RngStream target_rng(seed, SubStream(kStreamTrialTargets, 0));
  RngStream nontarget_rng(seed, SubStream(kStreamTrialNontargets, 0));
  target_rng.Shuffle(&same_pairs);
  nontarget_rng.Shuffle(&cross_pairs);

  TrialSet trials;
  trials.reserve(static_cast<size_t>(n_target) + n_nontarget);
  for (int i = 0; i < n_target; ++i)
    trials.push_back({same_pairs[i].first, same_pairs[i].second, true});
  for (int i = 0; i < n_nontarget; ++i)
    trials.push_back({cross_pairs[i].first, cross_pairs[i].second, false});
  return trials;
}

void WriteTrials(const TrialSet &trials, const std::string &path) {
  std::string bytes;
  for (const Trial &t : trials) {
    bytes += std::to_string(t.enroll_utt);
    bytes += '\t';
    bytes += std::to_string(t.test_utt);
    bytes += '\t';
    bytes += t.is_target ? "target" : "nontarget";
    bytes += '\n';
  }
  WriteFileBytes(path, bytes);
}

TrialSet ReadTrials(const std::string &path) {
  const std::string bytes = ReadFileBytes(path);
  TrialSet trials;
  uint64_t offset = 0;
  while (offset < bytes.size()) {
    size_t end = bytes.find('\n', offset);
    if (end == std::string::npos)
      throw ParseError(path + ": unterminated trial line", offset);
    std::string line = bytes.substr(offset, end - offset);
    std::istringstream s(line);
    Trial t;
    std::string label;
    s >> t.enroll_utt >> t.test_utt >> label;
    if (!s || (label != "target" && label != "nontarget"))
      throw ParseError(path + ": malformed trial line '" + line + "'", offset);
    t.is_target = (label == "target");
    trials.push_back(t);
    offset = end + 1;
  }
  if (trials.empty()) throw ParseError(path + ": empty trial list", 0);
  return trials;
}

}  // namespace mtml
