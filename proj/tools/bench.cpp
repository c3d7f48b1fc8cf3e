// Times each OpenMP kernel against its serial reference and checks that the
// outputs agree bit for bit. Run with TREEAUG_THREADS to vary the thread
// count. All sizes are deliberately modest so the whole run stays under a
// minute on one core.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "treeaug/augment.hpp"
#include "treeaug/conllu.hpp"
#include "treeaug/linalg.hpp"
#include "treeaug/rng.hpp"
#include "treeaug/tagger.hpp"

using namespace treeaug;

namespace {

double seconds_for(int reps, const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-24s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n", name, serial_s,
              parallel_s, serial_s / parallel_s, identical ? "bit-identical" : "MISMATCH");
}

Sentence make_sentence(RandomStream& rng, int n_tokens) {
  static const char* forms[] = {"taro", "miko", "satu", "veli", "ketu", "lima", "noru"};
  static const char* rels[] = {"nsubj", "obj", "iobj", "obl"};
  Sentence s;
  for (int i = 1; i <= n_tokens; ++i) {
    Token t;
    t.id = i;
    t.form = forms[uniform_below(rng, 7)];
    t.upos = i == n_tokens ? "VERB" : "NOUN";
    t.head = i == n_tokens ? 0 : n_tokens;
    t.deprel = i == n_tokens ? "root" : rels[uniform_below(rng, 4)];
    s.tokens.push_back(std::move(t));
  }
  return s;
}

void bench_matvec() {
  const int rows = 1024, cols = 1024;
  RandomStream rng = substream(7, 0);
  Matrix w(rows, cols);
  Vector x(cols);
  for (double& v : w.a) v = uniform_real(rng, -1.0, 1.0);
  for (double& v : x) v = uniform_real(rng, -1.0, 1.0);

  Vector y_serial, y_parallel;
  const int reps = 400;
  const double ts = seconds_for(reps, [&] { matvec_serial(w, x, y_serial); });
  const double tp = seconds_for(reps, [&] { matvec(w, x, y_parallel); });
  report("matvec 1024x1024", ts, tp, y_serial == y_parallel);
}

void bench_augment() {
  RandomStream rng = substream(7, 1);
  std::vector<Sentence> corpus;
  for (int i = 0; i < 4000; ++i) corpus.push_back(make_sentence(rng, 5 + (i % 8)));

  AugmentConfig cfg;
  cfg.seed = 11;
  std::vector<AugmentedSentence> serial_out, parallel_out;
  const double ts = seconds_for(1, [&] { serial_out = augment_dataset_serial(corpus, cfg); });
  const double tp = seconds_for(1, [&] { parallel_out = augment_dataset(corpus, cfg); });

  bool identical = serial_out.size() == parallel_out.size();
  if (identical) {
    std::vector<Sentence> a, b;
    for (const auto& item : serial_out) a.push_back(item.sentence);
    for (const auto& item : parallel_out) b.push_back(item.sentence);
    identical = serialize_conllu(a, false) == serialize_conllu(b, false);
  }
  report("augment 4000 sentences", ts, tp, identical);
}

void bench_evaluate() {
  RandomStream rng = substream(7, 2);
  std::vector<Sentence> corpus;
  for (int i = 0; i < 300; ++i) corpus.push_back(make_sentence(rng, 5 + (i % 8)));

  TaggerConfig cfg;
  cfg.char_embed_dim = cfg.char_hidden_dim = cfg.word_embed_dim = cfg.word_hidden_dim = 24;
  const TaggerModel model = init_model(cfg, corpus);

  EvalResult serial_r{}, parallel_r{};
  const double ts = seconds_for(1, [&] { serial_r = evaluate_serial(model, corpus); });
  const double tp = seconds_for(1, [&] { parallel_r = evaluate(model, corpus); });
  report("evaluate 300 sentences", ts, tp,
         serial_r.correct == parallel_r.correct && serial_r.total == parallel_r.total);
}

}  // namespace

int main() {
#ifdef _OPENMP
  if (const char* env = std::getenv("TREEAUG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel variants run serially\n");
#endif
  bench_matvec();
  bench_augment();
  bench_evaluate();
  return 0;
}
