// treeaug: augment CoNLL-U treebanks, report their stats, train/evaluate the
// character-level POS tagger, and drive baseline-vs-augmented experiments.
//
// Exit codes: 0 ok, 2 parse error (args or input files), 3 validation error,
// 4 training failure. Every error is one line on stderr with an E_* prefix.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "treeaug/augment.hpp"
#include "treeaug/conllu.hpp"
#include "treeaug/deptree.hpp"
#include "treeaug/experiment.hpp"
#include "treeaug/stats.hpp"
#include "treeaug/tagger.hpp"
#include "treeaug/text.hpp"

namespace {

using namespace treeaug;

void apply_thread_cap() {
#ifdef _OPENMP
  if (const char* env = std::getenv("TREEAUG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

std::set<std::string> comma_set(const std::string& csv) {
  std::set<std::string> out;
  for (const std::string& item : split(csv, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.insert(t);
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct AugmentOptions {
  std::string input, output;
  std::string op = "both";
  AugmentConfig cfg;
  int max_rot = -1;
  std::string loi_csv, root_phrase_csv;
};

void add_label_flags(CLI::App* cmd, AugmentOptions& o) {
  cmd->add_option("--loi", o.loi_csv,
                  "comma-separated labels of interest (default nsubj,obj,iobj,obl)");
  cmd->add_option("--root-phrase", o.root_phrase_csv,
                  "comma-separated root-phrase relations (default fixed,flat,cop,compound)");
}

void finish_augment_config(AugmentOptions& o) {
  if (o.op == "crop") {
    o.cfg.crop = true;
    o.cfg.rotate = false;
  } else if (o.op == "rotate") {
    o.cfg.crop = false;
    o.cfg.rotate = true;
  } else if (o.op == "both") {
    o.cfg.crop = true;
    o.cfg.rotate = true;
  } else {
    throw std::invalid_argument("--op must be crop, rotate or both");
  }
  if (o.max_rot >= 0) o.cfg.max_rotations_per_sentence = o.max_rot;
  if (!o.loi_csv.empty()) o.cfg.labels.loi = comma_set(o.loi_csv);
  if (!o.root_phrase_csv.empty()) o.cfg.labels.root_phrase = comma_set(o.root_phrase_csv);
  o.cfg.labels.check();
  o.cfg.check();
}

int run_augment(AugmentOptions& o) {
  finish_augment_config(o);
  const std::vector<Sentence> input = read_conllu_file(o.input);
  DatasetStats stats;
  std::vector<AugmentedSentence> augmented = augment_dataset(input, o.cfg, &stats);

  std::vector<Sentence> out;
  out.reserve(augmented.size());
  for (AugmentedSentence& item : augmented) out.push_back(std::move(item.sentence));
  write_conllu_file(o.output, out, /*validate=*/false);

  std::printf("in=%zu originals=%zu crops=%zu rotations=%zu ineligible=%zu duplicates_dropped=%zu\n",
              stats.input_sentences, stats.originals, stats.crops, stats.rotations,
              stats.ineligible, stats.duplicates_dropped);
  return 0;
}

int run_stats(const std::string& input, const std::string& loi_csv,
              const std::string& root_phrase_csv) {
  LabelConfig labels;
  if (!loi_csv.empty()) labels.loi = comma_set(loi_csv);
  if (!root_phrase_csv.empty()) labels.root_phrase = comma_set(root_phrase_csv);
  labels.check();

  const CorpusStats st = corpus_stats(read_conllu_file(input), labels);
  std::printf("sentences\t%zu\n", st.sentences);
  std::printf("tokens\t%zu\n", st.tokens);
  std::printf("invalid\t%zu\n", st.invalid);
  std::printf("bucket\t%s\n", st.bucket().c_str());
  const char* verdict = st.eligible() ? "eligible"
                        : st.tokens < 5000 ? "ignored (<5K)"
                                           : "ignored (>=120K)";
  std::printf("eligibility\t%s\n", verdict);
  std::string hist;
  for (const auto& [loi_count, sentences] : st.loi_histogram) {
    if (!hist.empty()) hist += ' ';
    hist += std::to_string(loi_count) + ":" + std::to_string(sentences);
  }
  std::printf("loi_histogram\t%s\n", hist.c_str());
  return 0;
}

void add_tagger_flags(CLI::App* cmd, TaggerConfig& cfg) {
  cmd->add_option("--char-embed-dim", cfg.char_embed_dim, "character embedding size");
  cmd->add_option("--char-hidden-dim", cfg.char_hidden_dim, "character LSTM hidden size");
  cmd->add_option("--word-embed-dim", cfg.word_embed_dim, "composed word vector size");
  cmd->add_option("--word-hidden-dim", cfg.word_hidden_dim, "word LSTM hidden size");
  cmd->add_option("--init-range", cfg.init_range, "uniform init range");
  cmd->add_option("--lr", cfg.lr_initial, "initial learning rate");
  cmd->add_option("--dropout", cfg.dropout_rate, "dropout rate on word vectors and features");
  cmd->add_option("--clip-norm", cfg.clip_norm, "global gradient norm clip (0 disables)");
  cmd->add_option("--patience", cfg.early_stop_patience,
                  "consecutive non-improving epochs before stopping");
  cmd->add_option("--max-epochs", cfg.max_epochs, "epoch cap");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--unk-replace-prob", cfg.unk_replace_prob,
                  "probability of replacing a rare character with UNK in training");
  cmd->add_flag("--no-unk-replace", [&cfg](int64_t) { cfg.unk_replace = false; },
                "disable rare-character UNK replacement");
}

int run_train(const std::string& train_path, const std::string& dev_path,
              const std::string& model_path, std::string history_path,
              const TaggerConfig& cfg) {
  const std::vector<Sentence> train_set = read_conllu_file(train_path);
  // With no dev file the training set doubles as the plateau signal.
  const std::vector<Sentence> dev_set =
      dev_path.empty() ? train_set : read_conllu_file(dev_path);

  const TrainResult result = train(train_set, dev_set, cfg);
  save_checkpoint(result.model, model_path);
  if (history_path.empty()) history_path = model_path + ".history.tsv";
  write_text_file(history_path, history_tsv(result.history));

  double best = 0.0;
  for (const EpochStats& e : result.history) best = std::max(best, e.dev_score);
  std::printf("epochs=%zu best_dev=%.4f model=%s history=%s\n", result.history.size(), best,
              model_path.c_str(), history_path.c_str());
  if (result.clamped_probs > 0) {
    std::fprintf(stderr, "warning: clamped %ld vanishing probabilities in the loss\n",
                 result.clamped_probs);
  }
  return 0;
}

int run_eval(const std::string& model_path, const std::string& test_path) {
  const TaggerModel model = load_checkpoint(model_path);
  const EvalResult r = evaluate(model, read_conllu_file(test_path));
  if (r.unknown_gold > 0) {
    std::fprintf(stderr, "warning: %zu gold tags outside the model vocabulary (counted wrong)\n",
                 r.unknown_gold);
  }
  std::printf("%.4f\n", r.accuracy());
  return 0;
}

int run_experiment_cmd(const std::string& train_path, const std::string& dev_path,
                       const std::string& test_path, AugmentOptions& aug, TaggerConfig& tcfg,
                       int runs, const std::string& format, const std::string& out_path) {
  if (format != "tsv" && format != "table") {
    throw std::invalid_argument("--format must be tsv or table");
  }
  aug.op = "both";  // per-setting op comes from the grid
  finish_augment_config(aug);
  tcfg.check();

  const std::vector<Sentence> train_set = read_conllu_file(train_path);
  const std::vector<Sentence> dev_set = read_conllu_file(dev_path);
  const std::vector<Sentence> test_set = read_conllu_file(test_path);

  const ExperimentReport report =
      run_experiment(train_set, dev_set, test_set, default_grid(), tcfg, aug.cfg, runs);
  const std::string rendered = format == "tsv" ? report_tsv(report) : report_table(report);
  if (!out_path.empty()) write_text_file(out_path, rendered);
  std::fputs(rendered.c_str(), stdout);
  return 0;
}

int run_correlate(const std::string& pairs_path, const std::string& out_path) {
  std::ifstream in(pairs_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + pairs_path);

  std::vector<double> sizes, gains;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream row(t);
    double x = 0.0, y = 0.0;
    if (!(row >> x >> y)) {
      throw ParseError(line_no, "expected two numbers (size, improvement)");
    }
    sizes.push_back(x);
    gains.push_back(y);
  }

  const double r = pearson(sizes, gains);
  if (!out_path.empty()) {
    std::ostringstream tsv;
    tsv << "size\timprovement\n";
    for (size_t i = 0; i < sizes.size(); ++i) {
      tsv << sizes[i] << '\t' << gains[i] << '\n';
    }
    write_text_file(out_path, tsv.str());
  }
  std::printf("%.4f\n", r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();

  CLI::App app{"dependency-tree crop/rotate augmentation and character-level POS tagging"};
  app.require_subcommand(1);

  AugmentOptions aug;
  CLI::App* cmd_augment = app.add_subcommand("augment", "augment a CoNLL-U file");
  cmd_augment->add_option("input", aug.input, "input CoNLL-U file")->required();
  cmd_augment->add_option("output", aug.output, "output CoNLL-U file")->required();
  cmd_augment->add_option("--op", aug.op, "crop|rotate|both (default both)");
  cmd_augment->add_option("--p", aug.cfg.p, "per-candidate keep probability");
  cmd_augment->add_option("--seed", aug.cfg.seed, "random seed");
  cmd_augment->add_option("--max-rot", aug.max_rot, "rotations sampled per sentence");
  cmd_augment->add_flag("--keep-punct", aug.cfg.keep_punct,
                        "keep root-attached punctuation in crops");
  cmd_augment->add_option("--include-originals", aug.cfg.include_originals,
                          "copy eligible originals into the output (default true)");
  add_label_flags(cmd_augment, aug);

  std::string stats_input, stats_loi, stats_root_phrase;
  CLI::App* cmd_stats = app.add_subcommand("stats", "token counts, size bucket, eligibility");
  cmd_stats->add_option("input", stats_input, "input CoNLL-U file")->required();
  cmd_stats->add_option("--loi", stats_loi, "comma-separated labels of interest");
  cmd_stats->add_option("--root-phrase", stats_root_phrase, "comma-separated root-phrase labels");

  std::string train_path, train_dev, train_model = "model.ckpt", train_history;
  TaggerConfig train_cfg;
  CLI::App* cmd_train = app.add_subcommand("train", "train the POS tagger");
  cmd_train->add_option("train", train_path, "training CoNLL-U file")->required();
  cmd_train->add_option("dev", train_dev, "development CoNLL-U file (defaults to train)");
  cmd_train->add_option("--model", train_model, "checkpoint output path");
  cmd_train->add_option("--history", train_history,
                        "epoch history TSV path (default <model>.history.tsv)");
  add_tagger_flags(cmd_train, train_cfg);

  std::string eval_model, eval_test;
  CLI::App* cmd_eval = app.add_subcommand("eval", "token accuracy of a checkpoint");
  cmd_eval->add_option("model", eval_model, "checkpoint path")->required();
  cmd_eval->add_option("test", eval_test, "test CoNLL-U file")->required();

  std::string exp_train, exp_dev, exp_test, exp_format = "table", exp_out;
  int exp_runs = 1;
  AugmentOptions exp_aug;
  TaggerConfig exp_cfg;
  CLI::App* cmd_exp =
      app.add_subcommand("experiment", "baseline vs crop/rotate grid, report with Imp%");
  cmd_exp->add_option("train", exp_train, "training CoNLL-U file")->required();
  cmd_exp->add_option("dev", exp_dev, "development CoNLL-U file")->required();
  cmd_exp->add_option("test", exp_test, "test CoNLL-U file")->required();
  cmd_exp->add_option("--runs", exp_runs, "training runs per setting, accuracies averaged");
  cmd_exp->add_option("--format", exp_format, "tsv|table (default table)");
  cmd_exp->add_option("--out", exp_out, "also write the report here");
  cmd_exp->add_option("--max-rot", exp_aug.max_rot, "rotations sampled per sentence");
  cmd_exp->add_flag("--keep-punct", exp_aug.cfg.keep_punct,
                    "keep root-attached punctuation in crops");
  cmd_exp->add_option("--include-originals", exp_aug.cfg.include_originals,
                      "copy originals into augmented training sets (default true)");
  add_label_flags(cmd_exp, exp_aug);
  add_tagger_flags(cmd_exp, exp_cfg);

  std::string corr_pairs, corr_out;
  CLI::App* cmd_corr =
      app.add_subcommand("correlate", "Pearson r between treebank size and gain");
  cmd_corr->add_option("pairs", corr_pairs, "TSV/whitespace file of (size, improvement) pairs")
      ->required();
  cmd_corr->add_option("--out", corr_out, "write a plot-ready TSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "E_ARGS: " << e.what() << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_augment)) return run_augment(aug);
    if (app.got_subcommand(cmd_stats)) return run_stats(stats_input, stats_loi, stats_root_phrase);
    if (app.got_subcommand(cmd_train)) {
      return run_train(train_path, train_dev, train_model, train_history, train_cfg);
    }
    if (app.got_subcommand(cmd_eval)) return run_eval(eval_model, eval_test);
    if (app.got_subcommand(cmd_exp)) {
      exp_aug.cfg.seed = exp_cfg.seed;  // one --seed drives augmentation and training
      return run_experiment_cmd(exp_train, exp_dev, exp_test, exp_aug, exp_cfg, exp_runs,
                                exp_format, exp_out);
    }
    if (app.got_subcommand(cmd_corr)) return run_correlate(corr_pairs, corr_out);
  } catch (const ParseError& e) {
    std::cerr << "E_PARSE: " << e.what() << '\n';
    return 2;
  } catch (const TrainingError& e) {
    std::cerr << "E_TRAIN: " << e.what() << '\n';
    return 4;
  } catch (const SerializeError& e) {
    std::cerr << "E_VALIDATE: " << e.what() << '\n';
    return 3;
  } catch (const StructureError& e) {
    std::cerr << "E_VALIDATE: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "E_VALIDATE: " << e.what() << '\n';
    return 3;
  } catch (const std::logic_error& e) {
    std::cerr << "E_VALIDATE: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "E_IO: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
