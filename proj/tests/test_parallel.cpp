// OpenMP kernels and drivers against their serial references. Everything
// here must agree bit for bit at any thread count: the kernels partition
// output elements, augmentation owns one RNG substream per sentence, and
// evaluation reduces integer counts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <string>
#include <vector>

#include "treeaug/augment.hpp"
#include "treeaug/conllu.hpp"
#include "treeaug/linalg.hpp"
#include "treeaug/rng.hpp"
#include "treeaug/tagger.hpp"

using namespace treeaug;

namespace {

// The sandbox may have one core; oversubscribe so the parallel paths really
// split the work.
struct ForceThreads {
  ForceThreads() {
#ifdef _OPENMP
    omp_set_num_threads(4);
#endif
  }
} force_threads;

Vector random_vector(RandomStream& g, size_t n) {
  Vector v(n);
  for (double& x : v) x = uniform_real(g, -2.0, 2.0);
  return v;
}

Matrix random_matrix(RandomStream& g, int rows, int cols) {
  Matrix m(rows, cols);
  for (double& x : m.a) x = uniform_real(g, -2.0, 2.0);
  return m;
}

std::string data_file(const char* name) {
  return std::string(TREEAUG_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("matvec agrees with the serial reference above the parallel cutoff") {
  RandomStream g = substream(17, 0);
  // 200x200 = 40000 elements, well past the cutoff that arms the omp branch.
  for (const auto& [rows, cols] : {std::pair{200, 200}, std::pair{513, 127}, std::pair{3, 5}}) {
    const Matrix w = random_matrix(g, rows, cols);
    const Vector x = random_vector(g, static_cast<size_t>(cols));
    Vector yp, ys;
    matvec(w, x, yp);
    matvec_serial(w, x, ys);
    CHECK(yp == ys);
  }
}

TEST_CASE("matvec_transpose_add agrees with the serial reference") {
  RandomStream g = substream(18, 0);
  for (const auto& [rows, cols] : {std::pair{200, 200}, std::pair{301, 97}}) {
    const Matrix w = random_matrix(g, rows, cols);
    const Vector x = random_vector(g, static_cast<size_t>(rows));
    Vector yp = random_vector(g, static_cast<size_t>(cols));
    Vector ys = yp;
    matvec_transpose_add(w, x, yp);
    matvec_transpose_add_serial(w, x, ys);
    CHECK(yp == ys);
  }
}

TEST_CASE("add_outer agrees with the serial reference") {
  RandomStream g = substream(19, 0);
  for (const auto& [rows, cols] : {std::pair{200, 200}, std::pair{97, 301}}) {
    const Vector x = random_vector(g, static_cast<size_t>(rows));
    const Vector y = random_vector(g, static_cast<size_t>(cols));
    Matrix wp = random_matrix(g, rows, cols);
    Matrix ws = wp;
    add_outer(wp, x, y);
    add_outer_serial(ws, x, y);
    CHECK(wp.a == ws.a);
  }
}

TEST_CASE("parallel augmentation reproduces the serial output byte for byte") {
  const auto sentences = read_conllu_file(data_file("train.conllu"));
  REQUIRE(sentences.size() > 100);

  AugmentConfig cfg;
  cfg.crop = true;
  cfg.rotate = true;
  cfg.p = 0.7;
  cfg.seed = 5;

  for (int variant = 0; variant < 2; ++variant) {
    if (variant == 1) {
      cfg.crop = false;
      cfg.p = 0.3;
      cfg.max_rotations_per_sentence = 3;
      cfg.include_originals = false;
    }
    DatasetStats sp, ss;
    const auto par = augment_dataset(sentences, cfg, &sp);
    const auto ser = augment_dataset_serial(sentences, cfg, &ss);

    REQUIRE(par.size() == ser.size());
    std::vector<Sentence> par_sents, ser_sents;
    for (size_t i = 0; i < par.size(); ++i) {
      CHECK(par[i].provenance.op == ser[i].provenance.op);
      CHECK(par[i].provenance.source_index == ser[i].provenance.source_index);
      CHECK(par[i].provenance.focus == ser[i].provenance.focus);
      CHECK(par[i].provenance.permutation == ser[i].provenance.permutation);
      par_sents.push_back(par[i].sentence);
      ser_sents.push_back(ser[i].sentence);
    }
    CHECK(serialize_conllu(par_sents, false) == serialize_conllu(ser_sents, false));

    CHECK(sp.input_sentences == ss.input_sentences);
    CHECK(sp.originals == ss.originals);
    CHECK(sp.crops == ss.crops);
    CHECK(sp.rotations == ss.rotations);
    CHECK(sp.ineligible == ss.ineligible);
    CHECK(sp.duplicates_dropped == ss.duplicates_dropped);
  }
}

TEST_CASE("parallel evaluation matches the serial counts") {
  const auto train = read_conllu_file(data_file("train.conllu"));
  const auto dev = read_conllu_file(data_file("dev.conllu"));
  REQUIRE_FALSE(dev.empty());

  TaggerConfig cfg;
  cfg.char_embed_dim = 6;
  cfg.char_hidden_dim = 6;
  cfg.word_embed_dim = 6;
  cfg.word_hidden_dim = 6;
  cfg.seed = 23;
  const TaggerModel m = init_model(cfg, train);

  const EvalResult par = evaluate(m, dev);
  const EvalResult ser = evaluate_serial(m, dev);
  CHECK(par.correct == ser.correct);
  CHECK(par.total == ser.total);
  CHECK(par.unknown_gold == ser.unknown_gold);
  CHECK(par.total > 0);
}
