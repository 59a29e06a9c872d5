// Trains the toy model on the bundled clusters, summarizes the validation
// clusters and prints their ROUGE-2 scores.
//
//   quickstart [train.jsonl] [val.jsonl]

#include <iostream>
#include <map>
#include <string>

#include "sgsum/sgsum.hpp"

int main(int argc, char** argv) {
  const std::string data_dir = SGSUM_DEMO_DATA_DIR;
  const std::string train_path = argc > 1 ? argv[1] : data_dir + "/toy_train.jsonl";
  const std::string val_path = argc > 2 ? argv[2] : data_dir + "/toy_val.jsonl";
  try {
    const auto train_records = sgsum::load_clusters(train_path).clusters;
    const auto val_records = sgsum::load_clusters(val_path).clusters;
    const auto train_set = sgsum::prepare_all(train_records);
    const auto val_set = sgsum::prepare_all(val_records);

    sgsum::RunConfig cfg = sgsum::toy_profile();
    cfg.epochs = 20;
    const sgsum::TrainResult trained = sgsum::train(cfg, train_set, val_set);
    std::cout << "trained " << trained.steps.size() << " steps, loss "
              << trained.steps.front().total << " -> " << trained.steps.back().total
              << ", kept epoch " << trained.best_epoch << "\n\n";

    const auto selected = sgsum::summarize_clusters(trained.model, val_set);
    std::map<std::string, std::string> predictions;
    for (std::size_t i = 0; i < val_set.size(); ++i) {
      const std::string text = sgsum::concat_text(val_set[i], selected[i].members);
      predictions[val_set[i].id] = text;
      std::cout << val_set[i].id << ": " << text << "\n";
    }
    std::cout << '\n';
    sgsum::print_table(std::cout, sgsum::evaluate(predictions, val_records));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
