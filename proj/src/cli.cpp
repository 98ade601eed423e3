#include "compskip/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "compskip/checkpoint.hpp"
#include "compskip/corpus.hpp"
#include "compskip/embeddings.hpp"
#include "compskip/error.hpp"
#include "compskip/evaluation.hpp"
#include "compskip/manifest.hpp"
#include "compskip/trainer.hpp"

namespace compskip {

namespace {

struct TrainArgs {
  TrainConfig config;
  std::string corpus;
  std::string model;
  std::string manifest;
  std::string resume;
  std::string from_manifest;
  std::string export_path;
  std::string export_format = "text";
  std::string vocab_dump;
  std::string mode = "baseline";
  std::optional<std::size_t> phrase_negatives;
  bool no_lowercase = false;
  bool save_each_epoch = false;
};

struct SourceArgs {
  std::string embeddings;
  std::string format = "text";
  std::string model;
  std::optional<double> alpha;
  int lowercase = -1;  // -1: inherit (checkpoint setting, else on)
};

struct LoadedEmbeddings {
  Embeddings embeddings;
  CompositionConfig comp;
  bool lowercase = true;
};

void add_source_options(CLI::App& cmd, SourceArgs& a) {
  auto* emb = cmd.add_option("--embeddings", a.embeddings, "word2vec-format embedding file");
  cmd.add_option("--format", a.format, "Embedding file format")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  auto* model = cmd.add_option("--model", a.model, "Checkpoint; its input embeddings are used");
  emb->excludes(model);
  cmd.add_option("--alpha", a.alpha, "Composition exponent (default: checkpoint value, else 1)");
  cmd.add_flag("--lowercase{1},--no-lowercase{0}", a.lowercase, "Lowercase dataset words");
}

LoadedEmbeddings load_source(const SourceArgs& a) {
  LoadedEmbeddings loaded;
  if (!a.model.empty()) {
    Checkpoint ckpt = load_checkpoint(a.model);
    loaded.embeddings = extract_embeddings(ckpt.params, ckpt.vocab, BankSelector{});
    loaded.comp = ckpt.config.composition();
    loaded.lowercase = ckpt.config.lowercase;
  } else if (!a.embeddings.empty()) {
    loaded.embeddings = load_embeddings(a.embeddings, *parse_format(a.format));
  } else {
    throw ConfigError("one of --embeddings or --model is required");
  }
  if (a.alpha) loaded.comp.alpha = *a.alpha;
  loaded.comp.validate();
  if (a.lowercase >= 0) loaded.lowercase = a.lowercase == 1;
  return loaded;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int run_train(TrainArgs& a, std::ostream& out) {
  const auto wall_start = std::chrono::steady_clock::now();
  TrainConfig config = a.config;
  std::string corpus_path = a.corpus;
  if (!a.from_manifest.empty()) {
    const RunManifest previous = read_manifest(a.from_manifest);
    config = previous.config;
    if (corpus_path.empty()) corpus_path = previous.corpus_path;
  } else {
    auto mode = parse_mode(a.mode);
    if (!mode) throw ConfigError("unknown mode: " + a.mode);
    config.mode = *mode;
    config.phrase_negatives = a.phrase_negatives.value_or(config.word_negatives);
    config.lowercase = !a.no_lowercase;
  }
  if (corpus_path.empty()) throw ConfigError("--corpus is required");

  std::optional<Checkpoint> resumed;
  if (!a.resume.empty()) {
    resumed = load_checkpoint(a.resume);
    config = resumed->config;
  }
  config.validate();

  if (!std::filesystem::is_regular_file(corpus_path)) {
    throw DataError("corpus file not found: " + corpus_path);
  }
  RunManifest manifest;
  manifest.corpus_path = corpus_path;
  manifest.corpus_digest = file_sha256(corpus_path);
  manifest.resumed_from = a.resume;

  const ParseOptions parse{config.lowercase, config.plain_text};
  const std::vector<ChunkedSentence> corpus = read_corpus(corpus_path, parse);

  Vocab vocab;
  PhraseVocab phrases;
  if (resumed) {
    vocab = resumed->vocab;
    phrases = resumed->phrases;
  } else {
    vocab = build_vocab(corpus, config.min_count);
    if (vocab.empty()) {
      throw DataError("no word in " + corpus_path + " reaches min-count " + std::to_string(config.min_count));
    }
    if (uses_phrases(config.mode)) {
      phrases = build_phrase_vocab(corpus, vocab, config.phrase_min_count, config.include_singletons);
    }
  }
  std::vector<EncodedSentence> encoded;
  encoded.reserve(corpus.size());
  for (const auto& s : corpus) encoded.push_back(encode_sentence(s, vocab, phrases));

  std::unique_ptr<Trainer> trainer =
      resumed ? std::make_unique<Trainer>(std::move(*resumed), std::move(encoded))
              : std::make_unique<Trainer>(config, vocab, phrases, std::move(encoded));
  out << "vocab " << trainer->vocab().size() << " words, " << trainer->phrases().size()
      << " phrases, " << trainer->corpus_tokens() << " tokens\n";
  if (!a.vocab_dump.empty()) {
    std::ofstream dump(a.vocab_dump);
    if (!dump) throw DataError("cannot write vocab dump " + a.vocab_dump);
    trainer->vocab().dump(dump);
  }

  trainer->run([&](const EpochReport& report) {
    out << format_epoch_line(report) << '\n';
    if (a.save_each_epoch) save_checkpoint(trainer->checkpoint(), a.model);
  });
  save_checkpoint(trainer->checkpoint(), a.model);
  if (!a.export_path.empty()) {
    export_embeddings(trainer->params(), trainer->vocab(), a.export_path,
                      *parse_format(a.export_format));
  }

  manifest.config = trainer->config();
  manifest.vocab_size = trainer->vocab().size();
  manifest.phrase_vocab_size = trainer->phrases().size();
  manifest.corpus_tokens = trainer->corpus_tokens();
  manifest.epochs = trainer->state().history;
  manifest.params_digest = params_digest(trainer->params());
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  const std::string manifest_path = a.manifest.empty() ? a.model + ".manifest" : a.manifest;
  write_manifest(manifest, manifest_path);
  out << "wrote " << a.model << " and " << manifest_path << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compositional skip-gram: train and evaluate word and phrase embeddings", "compskip"};
  app.require_subcommand(1);

  // train
  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "Train a model on a chunk-annotated corpus");
  {
    TrainConfig& c = train.config;
    cmd_train->add_option("--corpus", train.corpus, "Corpus: one sentence per line, [LABEL tok ...] chunks");
    cmd_train->add_option("--model", train.model, "Checkpoint output path")->required();
    cmd_train->add_option("--manifest", train.manifest, "Manifest path (default: <model>.manifest)");
    cmd_train->add_option("--resume", train.resume, "Continue from a checkpoint");
    cmd_train->add_option("--from-manifest", train.from_manifest, "Repeat the configuration of an earlier run");
    cmd_train->add_option("--export", train.export_path, "Also export input embeddings here");
    cmd_train->add_option("--export-format", train.export_format)
        ->check(CLI::IsMember({"text", "binary"}))
        ->capture_default_str();
    cmd_train->add_option("--vocab-dump", train.vocab_dump, "Write the word vocabulary here");
    cmd_train->add_option("--dim", c.dim)->capture_default_str();
    cmd_train->add_option("--window", c.window)->capture_default_str();
    cmd_train->add_option("--word-negatives", c.word_negatives)->capture_default_str();
    cmd_train->add_option("--phrase-negatives", train.phrase_negatives, "Default: --word-negatives");
    cmd_train->add_option("--min-count", c.min_count)->capture_default_str();
    cmd_train->add_option("--phrase-min-count", c.phrase_min_count)->capture_default_str();
    cmd_train->add_flag("--include-singletons", c.include_singletons, "Single-token chunks count as phrases");
    cmd_train->add_option("--alpha", c.alpha)->capture_default_str();
    cmd_train->add_option("--beta", c.beta)->capture_default_str();
    cmd_train->add_option("--mode", train.mode)
        ->check(CLI::IsMember({"baseline", "compositional", "positional", "compositional+positional",
                               "positional+compositional"}))
        ->capture_default_str();
    cmd_train->add_option("--epochs", c.epochs)->capture_default_str();
    cmd_train->add_option("--seed", c.seed)->capture_default_str();
    cmd_train->add_option("--workers", c.workers)->capture_default_str();
    cmd_train->add_option("--lr", c.lr_start)->capture_default_str();
    cmd_train->add_option("--subsample", c.subsample, "Frequent-word subsampling threshold (0 = off)")
        ->capture_default_str();
    cmd_train->add_option("--noise-exponent", c.noise_exponent)->capture_default_str();
    cmd_train->add_flag("--no-lowercase", train.no_lowercase, "Keep token case");
    cmd_train->add_flag("--plain-text", c.plain_text, "Ignore brackets; every token is its own chunk");
    cmd_train->add_flag("--save-each-epoch", train.save_each_epoch, "Checkpoint after every epoch");
  }

  // export
  std::string export_model, export_output, export_format = "text", export_which = "input";
  std::size_t export_bank = 0;
  auto* cmd_export = app.add_subcommand("export", "Export one embedding matrix in word2vec format");
  cmd_export->add_option("--model", export_model)->required();
  cmd_export->add_option("--output", export_output)->required();
  cmd_export->add_option("--format", export_format)->check(CLI::IsMember({"text", "binary"}))->capture_default_str();
  cmd_export->add_option("--which", export_which)
      ->check(CLI::IsMember({"input", "output", "phrase-output"}))
      ->capture_default_str();
  cmd_export->add_option("--bank", export_bank, "Bank index for output/phrase-output")->capture_default_str();

  // evaluations
  SourceArgs sim_src, analogy_src, phrase_src, nn_src;
  std::string sim_data, analogy_data, phrase_data;
  auto* cmd_sim = app.add_subcommand("eval-sim", "Spearman correlation on a word-similarity dataset");
  add_source_options(*cmd_sim, sim_src);
  cmd_sim->add_option("--dataset", sim_data)->required();
  auto* cmd_analogy = app.add_subcommand("eval-analogy", "3CosAdd accuracy on an analogy dataset");
  add_source_options(*cmd_analogy, analogy_src);
  cmd_analogy->add_option("--dataset", analogy_data)->required();
  auto* cmd_phrase = app.add_subcommand("eval-phrase", "Subject-verb composition similarity");
  add_source_options(*cmd_phrase, phrase_src);
  cmd_phrase->add_option("--dataset", phrase_data)->required();

  std::string nn_query;
  std::size_t nn_k = 10;
  auto* cmd_nn = app.add_subcommand("neighbors", "Nearest words to a word or [LABEL w1 w2] phrase");
  add_source_options(*cmd_nn, nn_src);
  cmd_nn->add_option("--query", nn_query)->required();
  cmd_nn->add_option("-k", nn_k)->capture_default_str();

  std::string manifest_path;
  auto* cmd_inspect = app.add_subcommand("inspect-manifest", "Print a run manifest");
  cmd_inspect->add_option("manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  try {
    if (*cmd_train) return run_train(train, out);

    if (*cmd_export) {
      const Checkpoint ckpt = load_checkpoint(export_model);
      BankSelector which;
      which.kind = export_which == "input"    ? BankKind::Input
                   : export_which == "output" ? BankKind::Output
                                              : BankKind::PhraseOutput;
      which.index = export_bank;
      export_embeddings(ckpt.params, ckpt.vocab, export_output, *parse_format(export_format), which);
      out << "wrote " << ckpt.vocab.size() << " vectors to " << export_output << '\n';
      return kExitOk;
    }

    if (*cmd_sim) {
      const LoadedEmbeddings e = load_source(sim_src);
      const auto r = word_similarity_eval(e.embeddings, load_similarity_dataset(sim_data, e.lowercase));
      out << "spearman=" << fixed(r.rho) << " used=" << r.used << " dropped=" << r.dropped
          << " coverage=" << fixed(r.coverage(), 4) << '\n';
      return kExitOk;
    }

    if (*cmd_analogy) {
      const LoadedEmbeddings e = load_source(analogy_src);
      const auto r = analogy_eval(e.embeddings, load_analogy_dataset(analogy_data, e.lowercase));
      for (const auto& s : r.sections) {
        out << "section " << s.name << " accuracy=" << fixed(s.accuracy(), 4) << " correct=" << s.correct
            << " used=" << s.used << " dropped=" << s.dropped << '\n';
      }
      out << "accuracy=" << fixed(r.accuracy(), 4) << " correct=" << r.correct << " used=" << r.used
          << " dropped=" << r.dropped << '\n';
      return kExitOk;
    }

    if (*cmd_phrase) {
      const LoadedEmbeddings e = load_source(phrase_src);
      const auto r = phrase_similarity_eval(e.embeddings, e.comp, load_phrase_dataset(phrase_data, e.lowercase));
      out << "spearman=" << fixed(r.rho) << " used=" << r.used << " dropped=" << r.dropped
          << " coverage=" << fixed(r.coverage(), 4) << '\n';
      return kExitOk;
    }

    if (*cmd_nn) {
      const LoadedEmbeddings e = load_source(nn_src);
      for (const auto& n : nearest_neighbors(e.embeddings, nn_query, nn_k, e.comp, e.lowercase)) {
        out << n.word << '\t' << fixed(n.cosine) << '\n';
      }
      return kExitOk;
    }

    if (*cmd_inspect) {
      for (const auto& [k, v] : read_manifest_entries(manifest_path)) out << k << '=' << v << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace compskip
