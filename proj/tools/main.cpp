// Unified command-line entry point: encode, embed, train, augment, dataset,
// eval (similarity/recover/typo/export), bench. Exit codes: 0 success,
// 1 config error, 2 I/O error, 3 numeric error.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "retcore/augment.hpp"
#include "retcore/bench.hpp"
#include "retcore/dataset.hpp"
#include "retcore/encoder.hpp"
#include "retcore/errors.hpp"
#include "retcore/eval.hpp"
#include "retcore/model.hpp"
#include "retcore/parallel.hpp"
#include "retcore/trainer.hpp"
#include "retcore/version.hpp"
#include "retcore/weights_io.hpp"

namespace {

using namespace retcore;
using ordered_json = nlohmann::ordered_json;

// Accepts the TOML-style files CLI11 reads natively, or a JSON object when
// the first non-space byte is '{'. Top-level keys map to global options,
// nested objects to subcommand sections.
class TomlOrJsonConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    const auto start = input.tellg();
    char first = 0;
    while (input.get(first) && std::isspace(static_cast<unsigned char>(first))) {
    }
    input.clear();
    input.seekg(start);
    if (first != '{') return CLI::ConfigTOML::from_config(input);

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::FileError(std::string("config file is not valid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(parsed, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    return value.dump();
  }

  static void flatten(const nlohmann::json& node, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        flatten(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& element : value) item.inputs.push_back(scalar(element));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

// ------------------------------------------------------------------- helpers

std::vector<std::string> read_nonempty_lines(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for reading");
    in = &file;
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> read_tokens(const std::string& path) {
  std::vector<std::string> tokens;
  for (const auto& line : read_nonempty_lines(path)) {
    for (auto& token : tokenize(line)) tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return buf.str();
}

// Output sink: "-" (or empty) means stdout.
class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open " + path + " for writing");
      out_ = &file_;
    } else {
      out_ = &std::cout;
    }
  }

  std::ostream& stream() { return *out_; }
  bool to_stdout() const { return out_ == &std::cout; }

  void finish() {
    out_->flush();
    if (!*out_) throw IoError("failed writing " + (to_stdout() ? "stdout" : path_));
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

std::string json_scalar(const ordered_json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

// The fully resolved configuration, echoed at the top of every text artifact.
void echo_header(std::ostream& out, const std::string& command, const ordered_json& resolved) {
  out << "# retcore " << kVersion << " " << command << "\n";
  for (const auto& [key, value] : resolved.items()) {
    out << "# " << key << "=" << json_scalar(value) << "\n";
  }
}

ordered_json run_config_of(const std::string& command, const ordered_json& resolved) {
  ordered_json run;
  run["command"] = command;
  run["version"] = kVersion;
  for (const auto& [key, value] : resolved.items()) run[key] = value;
  return run;
}

std::string fmt(double v, const char* spec = "%.9g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

EncoderConfig encoder_for(const ModelConfig& cfg) {
  EncoderConfig enc;
  enc.max_word_len = cfg.max_word_len;
  enc.bits_per_char = cfg.char_dim;
  return enc;
}

// -------------------------------------------------------------------- encode

struct EncodeArgs {
  std::string input;
  std::string out = "-";
  std::string format = "csv";
  int max_word_len = 16;
  int bits_per_char = 24;
  int max_words = 0;
  int threads = 0;
};

void run_encode(const EncodeArgs& a) {
  EncoderConfig cfg;
  cfg.max_word_len = a.max_word_len;
  cfg.bits_per_char = a.bits_per_char;
  cfg.validate();

  auto words = read_tokens(a.input);
  if (a.max_words > 0 && words.size() > static_cast<std::size_t>(a.max_words)) {
    words.resize(static_cast<std::size_t>(a.max_words));
  }
  const unsigned threads = resolve_thread_count(a.threads);
  const MatF bits = encode_words(words, cfg, threads);

  ordered_json resolved{{"input", a.input},        {"out", a.out},
                        {"format", a.format},      {"max_word_len", a.max_word_len},
                        {"bits_per_char", a.bits_per_char}, {"max_words", a.max_words},
                        {"threads", threads},      {"words", words.size()}};

  if (a.format == "bin") {
    if (a.out.empty() || a.out == "-") {
      throw ConfigError("--format bin requires --out <file>");
    }
    save_matrix(bits, "bits", a.out, run_config_of("encode", resolved));
    std::cout << "encoded " << words.size() << " words -> " << a.out << " ("
              << bits.rows() << "x" << bits.cols() << " float32)\n";
    return;
  }

  Output out(a.out);
  echo_header(out.stream(), "encode", resolved);
  for (Eigen::Index i = 0; i < bits.rows(); ++i) {
    for (Eigen::Index j = 0; j < bits.cols(); ++j) {
      if (j) out.stream() << ',';
      out.stream() << static_cast<int>(bits(i, j));
    }
    out.stream() << '\n';
  }
  out.finish();
}

// --------------------------------------------------------------------- embed

struct EmbedArgs {
  std::string weights;
  std::string input;
  std::string out = "-";
  int threads = 0;
};

void run_embed(const EmbedArgs& a) {
  const LoadedWeights loaded = load_weights(a.weights);
  const auto words = read_tokens(a.input);
  const unsigned threads = resolve_thread_count(a.threads);
  const MatF emb =
      embed_batch(words, loaded.weights, loaded.config, encoder_for(loaded.config), threads);

  ordered_json resolved{{"weights", a.weights},
                        {"input", a.input},
                        {"out", a.out},
                        {"threads", threads},
                        {"words", words.size()},
                        {"embedding_dim", loaded.config.embedding_dim}};

  Output out(a.out);
  echo_header(out.stream(), "embed", resolved);
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    for (Eigen::Index j = 0; j < emb.cols(); ++j) {
      if (j) out.stream() << ',';
      out.stream() << fmt(emb(i, j));
    }
    out.stream() << '\n';
  }
  out.finish();
}

// --------------------------------------------------------------------- train

struct TrainArgs {
  std::string vocab;
  std::string out = "model.rvec";
  std::string log;
  TrainConfig tc;
  MSLossConfig loss;
  ModelConfig model;
  AugmentationPolicy policy;
};

void run_train(const TrainArgs& a) {
  const auto vocab = read_nonempty_lines(a.vocab);
  a.model.validate();
  a.tc.validate();
  a.loss.validate();
  a.policy.validate();

  ordered_json resolved{{"vocab", a.vocab},
                        {"out", a.out},
                        {"log", a.log},
                        {"steps", a.tc.steps},
                        {"batch_size", a.tc.batch_size},
                        {"peak_lr", a.tc.peak_lr},
                        {"end_lr", a.tc.end_lr},
                        {"warmup", a.tc.warmup_steps},
                        {"weight_decay", a.tc.weight_decay},
                        {"augmented_share", a.tc.augmented_share},
                        {"seed", a.tc.seed},
                        {"alpha", a.loss.alpha},
                        {"beta", a.loss.beta},
                        {"lambda", a.loss.lambda},
                        {"margin", a.loss.epsilon_margin},
                        {"max_word_len", a.model.max_word_len},
                        {"char_dim", a.model.char_dim},
                        {"projection_dim", a.model.projection_dim},
                        {"fc_layers", a.model.fc_layers},
                        {"fc_dim", a.model.fc_dim},
                        {"embedding_dim", a.model.embedding_dim},
                        {"spatial_dropout", a.model.spatial_dropout_rate},
                        {"dropout", a.model.dropout_rate},
                        {"max_typos", a.policy.max_typos},
                        {"max_typo_fraction", a.policy.max_typo_fraction},
                        {"vocab_words", vocab.size()}};

  const auto tables = build_tables(vocab);
  const TrainResult result =
      train(vocab, a.model, a.tc, a.loss, tables, a.policy, encoder_for(a.model));

  save_weights(result.weights, a.model, a.out, run_config_of("train", resolved));

  if (!a.log.empty()) {
    Output log(a.log);
    echo_header(log.stream(), "train", resolved);
    log.stream() << "step,lr,loss\n";
    for (const auto& row : result.log) {
      log.stream() << row.step << ',' << fmt(row.lr, "%.12g") << ',' << fmt(row.loss, "%.12g")
                   << '\n';
    }
    log.finish();
  }

  const double final_loss = result.log.empty() ? 0.0 : result.log.back().loss;
  std::cout << "trained " << a.tc.steps << " steps on " << vocab.size() << " words, final loss "
            << fmt(final_loss, "%.6g") << " -> " << a.out << "\n";
}

// ------------------------------------------------------------------- augment

struct AugmentArgs {
  std::string vocab;
  std::string out = "-";
  std::string tables_dir;
  int count = 1;
  std::uint64_t seed = 1;
  AugmentationPolicy policy;
};

void run_augment(const AugmentArgs& a) {
  const auto vocab = read_nonempty_lines(a.vocab);
  a.policy.validate();
  if (a.count < 1) throw ConfigError("--count must be >= 1");

  ResourceTables tables = build_tables(vocab);
  if (!a.tables_dir.empty()) load_table_overrides(tables, a.tables_dir);

  ordered_json resolved{{"vocab", a.vocab},
                        {"out", a.out},
                        {"tables", a.tables_dir},
                        {"count", a.count},
                        {"seed", a.seed},
                        {"max_typos", a.policy.max_typos},
                        {"max_typo_fraction", a.policy.max_typo_fraction},
                        {"vocab_words", vocab.size()}};

  Output out(a.out);
  echo_header(out.stream(), "augment", resolved);
  Rng rng(a.seed);
  for (const auto& word : vocab) {
    for (int k = 0; k < a.count; ++k) {
      out.stream() << word << '\t' << augment_token(word, a.policy, tables, rng) << '\n';
    }
  }
  out.finish();
}

// ------------------------------------------------------------------- dataset

struct DatasetArgs {
  std::string vocab;
  std::string out = "-";
  std::string random_share = "original";
  DatasetSpec spec;
};

void run_dataset(const DatasetArgs& a) {
  const auto vocab = read_nonempty_lines(a.vocab);
  DatasetSpec spec = a.spec;
  if (a.random_share == "original") {
    spec.random_share_mode = RandomShare::of_original;
  } else if (a.random_share == "final") {
    spec.random_share_mode = RandomShare::of_final;
  } else {
    throw ConfigError("--random-share must be 'original' or 'final'");
  }
  spec.validate();

  ordered_json resolved{{"vocab", a.vocab},
                        {"out", a.out},
                        {"views", spec.views_per_token},
                        {"augmented", spec.augmented_views},
                        {"random_fraction", spec.random_token_fraction},
                        {"random_share", a.random_share},
                        {"seed", spec.seed},
                        {"vocab_words", vocab.size()}};

  const auto tables = build_tables(vocab);
  const AugmentationPolicy policy;
  DatasetStream stream(vocab, spec, tables, policy);

  Output out(a.out);
  echo_header(out.stream(), "dataset", resolved);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const DatasetEntry entry = stream.entry(i);
    out.stream() << entry.class_id << '\t' << (entry.is_random ? 1 : 0) << '\t' << entry.token
                 << '\n';
  }
  out.finish();
}

// ---------------------------------------------------------------------- eval

struct EvalSimilarityArgs {
  std::string weights;
  std::string vocab;
  std::string out;
  int pairs = 1000;
  std::uint64_t seed = 1;
};

void run_eval_similarity(const EvalSimilarityArgs& a) {
  const LoadedWeights loaded = load_weights(a.weights);
  const auto vocab = read_nonempty_lines(a.vocab);
  const auto tables = build_tables(vocab);
  const AugmentationPolicy policy;
  const ViewFn view = make_training_view(tables, policy, 1.0);

  const auto rows =
      similarity_distribution(loaded.weights, loaded.config, encoder_for(loaded.config),
                              {{"vocab", vocab}}, view, a.pairs, a.seed);

  ordered_json resolved{{"weights", a.weights},
                        {"vocab", a.vocab},
                        {"pairs", a.pairs},
                        {"seed", a.seed},
                        {"vocab_words", vocab.size()}};

  Output csv(a.out);
  std::ostream& summary = csv.to_stdout() ? std::cerr : std::cout;
  echo_header(csv.stream(), "eval similarity", resolved);
  csv.stream() << "group,n_pairs,mean,stddev,min,p25,median,p75,max\n";
  for (const auto& row : rows) {
    csv.stream() << row.group << ',' << row.n_pairs << ',' << fmt(row.mean) << ','
                 << fmt(row.stddev) << ',' << fmt(row.min) << ',' << fmt(row.p25) << ','
                 << fmt(row.median) << ',' << fmt(row.p75) << ',' << fmt(row.max) << '\n';
  }
  csv.finish();

  for (const auto& row : rows) {
    summary << row.group << ": mean " << fmt(row.mean, "%.4f") << ", stddev "
            << fmt(row.stddev, "%.4f") << ", median " << fmt(row.median, "%.4f") << ", range ["
            << fmt(row.min, "%.4f") << ", " << fmt(row.max, "%.4f") << "] over " << row.n_pairs
            << " pairs\n";
  }
  if (rows.size() >= 2) {
    summary << "separation (" << rows.front().group << " mean - " << rows.back().group
            << " mean): " << fmt(rows.front().mean - rows.back().mean, "%.4f") << "\n";
  }
}

struct EvalRecoverArgs {
  std::string weights;
  std::string vocab;
  std::string out;
  int queries = 1000;
  int edits = 1;
  std::uint64_t seed = 1;
};

void run_eval_recover(const EvalRecoverArgs& a) {
  if (a.edits < 0) throw ConfigError("--edits must be >= 0");
  if (a.queries < 1) throw ConfigError("--queries must be >= 1");
  const LoadedWeights loaded = load_weights(a.weights);
  const auto vocab = read_nonempty_lines(a.vocab);
  const auto tables = build_tables(vocab);

  ordered_json resolved{{"weights", a.weights}, {"vocab", a.vocab}, {"queries", a.queries},
                        {"edits", a.edits},     {"seed", a.seed},   {"vocab_words", vocab.size()}};

  Output csv(a.out);
  std::ostream& summary = csv.to_stdout() ? std::cerr : std::cout;
  echo_header(csv.stream(), "eval recover", resolved);
  csv.stream() << "edits,queries,recovery\n";
  for (int k = 0; k <= a.edits; ++k) {
    const double rate = nn_recovery(loaded.weights, loaded.config, encoder_for(loaded.config),
                                    vocab, make_edit_view(tables, k), a.queries, a.seed);
    csv.stream() << k << ',' << a.queries << ',' << fmt(rate, "%.6g") << '\n';
    summary << "recovery at " << k << " edits: " << fmt(rate, "%.4f") << " (" << a.queries
            << " queries)\n";
  }
  csv.finish();
}

struct EvalTypoArgs {
  std::string input;
  std::string out = "-";
  std::vector<std::string> kinds;
  std::vector<int> blocks = {1, 2};
  double rate = 0.1;
  std::uint64_t seed = 1;
};

void run_eval_typo(const EvalTypoArgs& a) {
  TypoInjectorConfig cfg;
  cfg.word_typo_rate = a.rate;
  cfg.block_sizes = a.blocks;
  cfg.seed = a.seed;
  if (!a.kinds.empty()) {
    cfg.typo_kinds.clear();
    for (const auto& name : a.kinds) cfg.typo_kinds.push_back(typo_kind_from_name(name));
  }
  cfg.validate();

  const std::string text = read_file(a.input);
  const auto tokens = tokenize(text);
  // The corrupted corpus must stay byte-compatible with the original outside
  // the injected typos, so the config echo goes to the summary stream only.
  std::string corrupted = text;
  if (!tokens.empty()) {
    const auto tables = build_tables(tokens);
    corrupted = inject_typos(text, cfg, tables);
  }

  Output out(a.out);
  std::ostream& summary = out.to_stdout() ? std::cerr : std::cout;
  out.stream() << corrupted;
  out.finish();

  std::size_t modified = 0;
  const auto out_tokens = tokenize(corrupted);
  for (std::size_t i = 0; i < tokens.size() && i < out_tokens.size(); ++i) {
    if (tokens[i] != out_tokens[i]) ++modified;
  }
  ordered_json resolved{{"input", a.input}, {"out", a.out},   {"rate", a.rate},
                        {"seed", a.seed},   {"words", tokens.size()}, {"modified", modified}};
  echo_header(summary, "eval typo", resolved);
  summary << "injected typos into " << modified << " of " << tokens.size() << " words\n";
}

struct EvalExportArgs {
  std::string weights;
  std::string vocab;
  std::string out_dir;
};

void run_eval_export(const EvalExportArgs& a) {
  const LoadedWeights loaded = load_weights(a.weights);
  const auto vocab = read_nonempty_lines(a.vocab);

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) throw IoError("cannot create directory " + a.out_dir + ": " + ec.message());

  export_projection(loaded.weights, loaded.config, encoder_for(loaded.config), vocab, a.out_dir);

  ordered_json resolved{{"weights", a.weights},
                        {"vocab", a.vocab},
                        {"out_dir", a.out_dir},
                        {"vocab_words", vocab.size()},
                        {"embedding_dim", loaded.config.embedding_dim}};
  std::ofstream run(std::filesystem::path(a.out_dir) / "run_config.json",
                    std::ios::binary | std::ios::trunc);
  run << run_config_of("eval export", resolved).dump(2) << "\n";
  if (!run) throw IoError("failed writing run_config.json");

  std::cout << "exported " << vocab.size() << " embeddings (dim "
            << loaded.config.embedding_dim << ") to " << a.out_dir
            << " (vectors.tsv, metadata.tsv, run_config.json)\n";
}

// --------------------------------------------------------------------- bench

struct BenchArgs {
  std::string input;
  std::string mode = "raw";
  std::string weights;
  int threads = 0;
  bool preload = false;
};

void run_bench(const BenchArgs& a) {
  const unsigned threads = resolve_thread_count(a.threads);
  ModelConfig model_cfg;
  EncoderConfig enc;
  std::unique_ptr<ModelWeights<float>> weights;
  if (!a.weights.empty()) {
    LoadedWeights loaded = load_weights(a.weights);
    model_cfg = loaded.config;
    enc = encoder_for(model_cfg);
    weights = std::make_unique<ModelWeights<float>>(std::move(loaded.weights));
  }

  const BenchReport report =
      bench_vectorize(a.input, a.mode, threads, weights.get(), model_cfg, enc, a.preload);

  ordered_json out;
  out["mode"] = report.mode;
  out["tokens_processed"] = report.tokens_processed;
  out["wall_seconds"] = report.wall_seconds;
  out["tokens_per_second"] = report.tokens_per_second;
  out["preprocessing_seconds"] = report.preprocessing_seconds;
  out["peak_resident_memory_bytes"] = report.peak_resident_memory_bytes;
  out["thread_count"] = report.thread_count;
  char digest[24];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(report.output_digest));
  out["output_digest"] = digest;
  out["config"] = run_config_of("bench", ordered_json{{"input", a.input},
                                                      {"mode", a.mode},
                                                      {"weights", a.weights},
                                                      {"threads", threads},
                                                      {"preload", a.preload}});
  std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stateless word vectorizer and metric-embedding toolkit"};
  app.set_version_flag("--version", std::string("retcore ") + kVersion + " (weights format " +
                                        std::to_string(kWeightsFormatVersion) + ")");
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<TomlOrJsonConfig>());
  app.set_config("--config", "", "TOML or JSON config file; flags override file values");

  EncodeArgs encode_args;
  auto* encode = app.add_subcommand("encode", "binarize words into 0/1 encodings");
  encode->fallthrough();
  encode->add_option("--input", encode_args.input, "newline-delimited UTF-8 words ('-' = stdin)")
      ->required();
  encode->add_option("--out", encode_args.out, "output path ('-' = stdout)");
  encode->add_option("--format", encode_args.format, "output format")
      ->check(CLI::IsMember({"csv", "bin"}));
  encode->add_option("--max-word-len", encode_args.max_word_len, "characters kept per word");
  encode->add_option("--bits-per-char", encode_args.bits_per_char, "bits per character");
  encode->add_option("--max-words", encode_args.max_words, "cap on words read (0 = all)");
  encode->add_option("--threads", encode_args.threads,
                     "worker threads (0: RETCORE_THREADS, then hardware)");
  encode->callback([&] { run_encode(encode_args); });

  EmbedArgs embed_args;
  auto* embed = app.add_subcommand("embed", "embed words with trained weights");
  embed->fallthrough();
  embed->add_option("--weights", embed_args.weights, "weight file")->required();
  embed->add_option("--input", embed_args.input, "newline-delimited UTF-8 words ('-' = stdin)")
      ->required();
  embed->add_option("--out", embed_args.out, "output path ('-' = stdout)");
  embed->add_option("--threads", embed_args.threads,
                    "worker threads (0: RETCORE_THREADS, then hardware)");
  embed->callback([&] { run_embed(embed_args); });

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train embedding weights on a vocabulary");
  train_cmd->fallthrough();
  train_cmd->add_option("--vocab", train_args.vocab, "newline-delimited vocabulary")->required();
  train_cmd->add_option("--out", train_args.out, "output weight file");
  train_cmd->add_option("--log", train_args.log, "training log CSV (step,lr,loss)");
  train_cmd->add_option("--steps", train_args.tc.steps, "optimizer steps")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--batch-size", train_args.tc.batch_size, "batch size (even)");
  train_cmd->add_option("--alpha", train_args.loss.alpha, "positive-pair sharpness")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--beta", train_args.loss.beta, "negative-pair sharpness")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lambda", train_args.loss.lambda, "similarity offset")
      ->check(CLI::Range(-1.0, 1.0));
  train_cmd->add_option("--margin", train_args.loss.epsilon_margin, "pair mining margin")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--peak-lr", train_args.tc.peak_lr, "peak learning rate")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--end-lr", train_args.tc.end_lr, "final learning rate")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--warmup", train_args.tc.warmup_steps, "linear warmup steps")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--weight-decay", train_args.tc.weight_decay, "decoupled weight decay")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--augmented-share", train_args.tc.augmented_share,
                        "share of training views augmented")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--seed", train_args.tc.seed, "rng seed");
  train_cmd->add_option("--max-word-len", train_args.model.max_word_len, "characters per word");
  train_cmd->add_option("--char-dim", train_args.model.char_dim, "bits per character");
  train_cmd->add_option("--projection-dim", train_args.model.projection_dim,
                        "per-character projection width");
  train_cmd->add_option("--fc-layers", train_args.model.fc_layers, "hidden layer count");
  train_cmd->add_option("--fc-dim", train_args.model.fc_dim, "hidden layer width");
  train_cmd->add_option("--embedding-dim", train_args.model.embedding_dim, "embedding width");
  train_cmd->add_option("--spatial-dropout", train_args.model.spatial_dropout_rate,
                        "character-row dropout rate")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--dropout", train_args.model.dropout_rate, "dense dropout rate")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--max-typos", train_args.policy.max_typos, "augmentation edit cap")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--max-typo-fraction", train_args.policy.max_typo_fraction,
                        "augmentation edit budget fraction")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->callback([&] { run_train(train_args); });

  AugmentArgs augment_args;
  auto* augment = app.add_subcommand("augment", "emit augmented views of a vocabulary");
  augment->fallthrough();
  augment->add_option("--vocab", augment_args.vocab, "newline-delimited vocabulary")->required();
  augment->add_option("--out", augment_args.out, "output TSV ('-' = stdout)");
  augment->add_option("--count", augment_args.count, "views per token");
  augment->add_option("--seed", augment_args.seed, "rng seed");
  augment->add_option("--tables", augment_args.tables_dir,
                      "directory of table override files (qwerty.tsv, homoglyphs.tsv, "
                      "punctuation.tsv, emoji.tsv)");
  augment->add_option("--max-typos", augment_args.policy.max_typos, "edit cap per token")
      ->check(CLI::NonNegativeNumber);
  augment->add_option("--max-typo-fraction", augment_args.policy.max_typo_fraction,
                      "edit budget fraction")
      ->check(CLI::Range(0.0, 1.0));
  augment->callback([&] { run_augment(augment_args); });

  DatasetArgs dataset_args;
  auto* dataset = app.add_subcommand("dataset", "materialize the training view dataset");
  dataset->fallthrough();
  dataset->add_option("--vocab", dataset_args.vocab, "newline-delimited vocabulary")->required();
  dataset->add_option("--out", dataset_args.out, "output TSV ('-' = stdout)");
  dataset->add_option("--views", dataset_args.spec.views_per_token, "views per class");
  dataset->add_option("--augmented", dataset_args.spec.augmented_views,
                      "augmented views per class");
  dataset->add_option("--random-fraction", dataset_args.spec.random_token_fraction,
                      "random-token class fraction");
  dataset->add_option("--random-share", dataset_args.random_share,
                      "fraction base: size of the original vocab or the final pool")
      ->check(CLI::IsMember({"original", "final"}));
  dataset->add_option("--seed", dataset_args.spec.seed, "rng seed");
  dataset->callback([&] { run_dataset(dataset_args); });

  auto* eval = app.add_subcommand("eval", "evaluation harness");
  eval->require_subcommand(1);
  eval->fallthrough();

  EvalSimilarityArgs sim_args;
  auto* sim = eval->add_subcommand("similarity", "cosine similarity distributions");
  sim->fallthrough();
  sim->add_option("--weights", sim_args.weights, "weight file")->required();
  sim->add_option("--vocab", sim_args.vocab, "newline-delimited vocabulary")->required();
  sim->add_option("--pairs", sim_args.pairs, "pairs per group")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_args.seed, "rng seed");
  sim->add_option("--out", sim_args.out, "stats CSV path (default stdout)");
  sim->callback([&] { run_eval_similarity(sim_args); });

  EvalRecoverArgs recover_args;
  auto* recover = eval->add_subcommand("recover", "nearest-neighbor recovery under edits");
  recover->fallthrough();
  recover->add_option("--weights", recover_args.weights, "weight file")->required();
  recover->add_option("--vocab", recover_args.vocab, "newline-delimited vocabulary")->required();
  recover->add_option("--queries", recover_args.queries, "query count")
      ->check(CLI::PositiveNumber);
  recover->add_option("--edits", recover_args.edits, "max edit count (reports 0..K)")
      ->check(CLI::NonNegativeNumber);
  recover->add_option("--seed", recover_args.seed, "rng seed");
  recover->add_option("--out", recover_args.out, "stats CSV path (default stdout)");
  recover->callback([&] { run_eval_recover(recover_args); });

  EvalTypoArgs typo_args;
  auto* typo = eval->add_subcommand("typo", "inject word-level typos into a text corpus");
  typo->fallthrough();
  typo->add_option("--input", typo_args.input, "text file ('-' = stdin)")->required();
  typo->add_option("--rate", typo_args.rate, "share of words to corrupt")
      ->check(CLI::Range(0.0, 1.0));
  typo->add_option("--kinds", typo_args.kinds,
                   "typo kinds (insertion, deletion, substitution, neighbor_swap, keyboard)")
      ->delimiter(',');
  typo->add_option("--blocks", typo_args.blocks, "block sizes (1 and/or 2)")->delimiter(',');
  typo->add_option("--seed", typo_args.seed, "rng seed");
  typo->add_option("--out", typo_args.out, "corrupted corpus path ('-' = stdout)");
  typo->callback([&] { run_eval_typo(typo_args); });

  EvalExportArgs export_args;
  auto* exp = eval->add_subcommand("export", "write projector-ready embedding TSVs");
  exp->fallthrough();
  exp->add_option("--weights", export_args.weights, "weight file")->required();
  exp->add_option("--vocab", export_args.vocab, "newline-delimited vocabulary")->required();
  exp->add_option("--out-dir", export_args.out_dir, "output directory")->required();
  exp->callback([&] { run_eval_export(export_args); });

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "throughput and memory benchmark");
  bench->fallthrough();
  bench->add_option("--input", bench_args.input, "newline-delimited corpus")->required();
  bench->add_option("--mode", bench_args.mode, "raw encodings or model embeddings")
      ->check(CLI::IsMember({"raw", "model"}));
  bench->add_option("--threads", bench_args.threads,
                    "worker threads (0: RETCORE_THREADS, then hardware)");
  bench->add_option("--weights", bench_args.weights, "weight file (required for mode model)");
  bench->add_flag("--preload", bench_args.preload, "read the corpus before the clock starts");
  bench->callback([&] { run_bench(bench_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::RequiredError& e) {
    const auto subs = app.get_subcommands();
    std::cerr << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
