#include "treeaug/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "treeaug/stats.hpp"

namespace treeaug {

namespace {

std::string setting_name(const char* op, double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s@%g", op, p);
  return buf;
}

}  // namespace

std::vector<ExperimentSetting> default_grid() {
  std::vector<ExperimentSetting> grid;
  grid.push_back({"org", false, false, 0.0});
  for (const double p : {0.3, 0.7, 1.0}) grid.push_back({setting_name("crop", p), true, false, p});
  for (const double p : {0.3, 0.7, 1.0}) grid.push_back({setting_name("rotate", p), false, true, p});
  return grid;
}

const ExperimentRow* ExperimentReport::baseline() const {
  for (const ExperimentRow& row : rows) {
    if (row.setting == "org") return &row;
  }
  return nullptr;
}

ExperimentReport run_experiment(const std::vector<Sentence>& train,
                                const std::vector<Sentence>& dev,
                                const std::vector<Sentence>& test,
                                const std::vector<ExperimentSetting>& grid,
                                const TaggerConfig& tagger_cfg, const AugmentConfig& aug_cfg,
                                int runs) {
  if (grid.empty()) throw std::invalid_argument("experiment: empty setting grid");
  if (runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");

  ExperimentReport report;
  report.seed = tagger_cfg.seed;
  report.runs = runs;
  // Dev and test must come out of the run byte-identical; snapshot them now.
  report.dev_checksum = fnv1a(serialize_conllu(dev, false));
  report.test_checksum = fnv1a(serialize_conllu(test, false));

  for (const ExperimentSetting& setting : grid) {
    ExperimentRow row;
    row.setting = setting.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      double acc_sum = 0.0;
      for (int run = 0; run < runs; ++run) {
        std::vector<Sentence> train_used;
        if (setting.is_baseline()) {
          train_used = train;
        } else {
          AugmentConfig ac = aug_cfg;
          ac.crop = setting.crop;
          ac.rotate = setting.rotate;
          ac.p = setting.p;
          ac.seed = aug_cfg.seed + static_cast<uint64_t>(run);
          ac.check();
          std::vector<AugmentedSentence> augmented = augment_dataset(train, ac);
          train_used.reserve(augmented.size());
          for (AugmentedSentence& item : augmented) {
            train_used.push_back(std::move(item.sentence));
          }
        }
        if (run == 0) {
          row.train_sentences = train_used.size();
          for (const Sentence& s : train_used) row.train_tokens += s.tokens.size();
        }
        TaggerConfig tc = tagger_cfg;
        tc.seed = tagger_cfg.seed + static_cast<uint64_t>(run);
        const TrainResult trained = treeaug::train(train_used, dev, tc);
        acc_sum += evaluate(trained.model, test).accuracy();
      }
      row.accuracy = acc_sum / runs;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.accuracy = 0.0;
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(std::move(row));
  }

  if (fnv1a(serialize_conllu(dev, false)) != report.dev_checksum ||
      fnv1a(serialize_conllu(test, false)) != report.test_checksum) {
    throw std::logic_error("experiment: dev or test set changed during the run");
  }

  const ExperimentRow* org = report.baseline();
  double best_aug = -1.0;
  for (const ExperimentRow& row : report.rows) {
    if (row.setting != "org" && !row.failed && row.accuracy > best_aug) best_aug = row.accuracy;
  }
  if (org && !org->failed && org->accuracy > 0.0 && best_aug >= 0.0) {
    report.improvement_pct = (best_aug - org->accuracy) / org->accuracy * 100.0;
  }
  return report;
}

std::string report_tsv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "setting\ttrain_sentences\ttrain_tokens\taccuracy\tseconds\tstatus\n";
  char buf[64];
  for (const ExperimentRow& row : report.rows) {
    out << row.setting << '\t' << row.train_sentences << '\t' << row.train_tokens << '\t';
    std::snprintf(buf, sizeof(buf), "%.4f\t%.2f\t", row.accuracy, row.seconds);
    out << buf << (row.failed ? "failed: " + row.error : "ok") << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.2f", report.improvement_pct);
  out << "# improvement_pct\t" << buf << '\n';
  out << "# seed\t" << report.seed << "\truns\t" << report.runs << '\n';
  return out.str();
}

std::string report_table(const ExperimentReport& report) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %9s %8s  %s\n", "setting", "sentences",
                "tokens", "accuracy", "seconds", "status");
  out << buf;
  for (const ExperimentRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-12s %10zu %10zu %9.4f %8.2f  %s\n", row.setting.c_str(),
                  row.train_sentences, row.train_tokens, row.accuracy, row.seconds,
                  row.failed ? row.error.c_str() : "ok");
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "best augmented vs org: %+.2f%%  (seed %llu, %d run%s)\n",
                report.improvement_pct, static_cast<unsigned long long>(report.seed), report.runs,
                report.runs == 1 ? "" : "s");
  out << buf;
  return out.str();
}

}  // namespace treeaug
