// SPDX-License-Identifier: Apache-2.0
//
// seqcomp: command-line front end.
//
//   simulate-hmm | encode-text  ->  dataset file
//   group-stats                 ->  grouping report
//   train                       ->  chain file
//   predict                     ->  predictions file
//   evaluate                    ->  error_rate / amlp
//   sweep                       ->  per-order table (order, G, originals, ratio, timings, metrics)

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "seqcomp/seqcomp.hpp"

namespace {

using namespace seqcomp;

/// Output sink: a file when a path is given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (file_) {
      file_->close();
      if (!*file_) throw std::runtime_error("failed to write output file");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string provenance(const std::string& command, const std::vector<std::pair<std::string, std::string>>& flags) {
  std::ostringstream os;
  os << "seqcomp " << kVersion << ' ' << command;
  for (const auto& [k, v] : flags) os << " --" << k << ' ' << v;
  return os.str();
}

SequenceDataset load_at_order(const std::string& path, int order) {
  auto data = read_dataset_file(path);
  if (order > data.order())
    throw std::runtime_error("--order " + std::to_string(order) + " exceeds the history length " +
                             std::to_string(data.order()) + " available in '" + path + "'");
  return data.with_order(order);
}

struct TrainFlags {
  std::string data;
  int order = 0;
  std::string prior = "cauchy";
  int iters = 2000;
  int burnin = 750;
  int thin = 5;
  std::uint64_t seed = 1;
  std::string out;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool require_data = true) {
  auto* d = cmd->add_option("--data", f.data, "training dataset file");
  if (require_data) d->required()->check(CLI::ExistingFile);
  cmd->add_option("--order", f.order, "history length O used by the model")->check(CLI::PositiveNumber);
  cmd->add_option("--prior", f.prior, "coefficient prior law")
      ->check(CLI::IsMember({"cauchy", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--iters", f.iters, "MCMC iterations")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--burnin", f.burnin, "discarded initial iterations")->capture_default_str();
  cmd->add_option("--thin", f.thin, "retain every n-th iteration after burn-in")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "random seed")->capture_default_str();
  cmd->add_option("--out", f.out, "output file (stdout if omitted)");
}

McmcConfig mcmc_config(const TrainFlags& f) {
  McmcConfig c;
  c.iterations = f.iters;
  c.burn_in = f.burnin;
  c.thin = f.thin;
  c.seed = f.seed;
  c.validate();
  return c;
}

std::vector<std::pair<std::string, std::string>> train_flag_list(const TrainFlags& f) {
  return {{"data", f.data},
          {"order", std::to_string(f.order)},
          {"prior", f.prior},
          {"iters", std::to_string(f.iters)},
          {"burnin", std::to_string(f.burnin)},
          {"thin", std::to_string(f.thin)},
          {"seed", std::to_string(f.seed)}};
}

// ---------------------------------------------------------------------------

void cmd_simulate_hmm(std::size_t n, std::size_t length, std::uint64_t seed, const std::string& out_path) {
  Rng rng(seed);
  const auto data = hmm_generate(n, length, rng);
  const std::vector<std::string> pre = {provenance(
      "simulate-hmm", {{"n", std::to_string(n)}, {"length", std::to_string(length)}, {"seed", std::to_string(seed)}})};
  Output out(out_path);
  write_dataset(out.stream(), data, pre);
  out.close();
}

void cmd_encode_text(const std::string& text_path, int order, std::size_t n_train, const std::string& out_path,
                     const std::string& test_path) {
  std::ifstream in(text_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open text file '" + text_path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto seq = encode_text(text);
  const auto all = windowize(seq, order).with_num_classes(3);
  const std::vector<std::string> pre = {
      provenance("encode-text", {{"text", text_path}, {"order", std::to_string(order)}, {"n-train", std::to_string(n_train)}}),
      "encoded length " + std::to_string(seq.size()) + ", " + std::to_string(all.size()) + " windows"};
  if (n_train == 0 || n_train >= all.size()) {
    if (!test_path.empty()) throw std::runtime_error("--test-out needs --n-train smaller than the number of windows");
    Output out(out_path);
    write_dataset(out.stream(), all, pre);
    out.close();
    return;
  }
  Output out(out_path);
  write_dataset(out.stream(), all.slice(0, n_train), pre);
  out.close();
  if (!test_path.empty()) {
    Output test(test_path);
    write_dataset(test.stream(), all.slice(n_train, all.size() - n_train), pre);
    test.close();
  }
}

void cmd_group_stats(const std::string& data_path, int order, const std::string& out_path) {
  auto data = read_dataset_file(data_path);
  if (order > data.order())
    throw std::runtime_error("--order " + std::to_string(order) + " exceeds the history length " +
                             std::to_string(data.order()) + " available in '" + data_path + "'");
  if (order > 0) data = data.with_order(order);
  const auto grouping = build_grouping(data);
  Output out(out_path);
  auto& os = out.stream();
  os << "# " << provenance("group-stats", {{"data", data_path}, {"order", std::to_string(data.order())}}) << '\n';
  os << "# g b f suffix... |E_g|\n";
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    const auto& sp = grouping.pattern(g);
    os << g + 1 << ' ' << sp.b << ' ' << sp.f;
    for (int v : sp.suffix) os << ' ' << v;
    os << ' ' << grouping.expression(g).size() << '\n';
  }
  os << "G=" << grouping.size() << " originals=" << grouping.original_parameter_count()
     << " ratio=" << std::setprecision(6) << grouping.compression_ratio() << '\n';
  out.close();
}

void cmd_train(TrainFlags f) {
  if (f.order == 0) f.order = read_dataset_file(f.data).order();
  const auto data = load_at_order(f.data, f.order);
  const auto grouping = build_grouping(data);
  const auto prior = PriorSpec::for_law(parse_law(f.prior));
  const auto cfg = mcmc_config(f);
  Rng rng(f.seed);
  const auto chain = run_chain(data, grouping, prior, cfg, rng);
  const std::vector<std::string> pre = {provenance("train", train_flag_list(f))};
  Output out(f.out);
  write_chain(out.stream(), chain, pre);
  out.close();
}

void cmd_predict(TrainFlags f, const std::string& chain_path, const std::string& test_path, unsigned threads) {
  std::ifstream cin_(chain_path);
  if (!cin_) throw std::runtime_error("cannot open chain file '" + chain_path + "'");
  const auto chain = read_chain(cin_, chain_path);
  if (f.order != 0 && f.order != chain.history_length)
    throw std::runtime_error("--order " + std::to_string(f.order) + " does not match the chain (O=" +
                             std::to_string(chain.history_length) + ")");
  if (!f.prior.empty() && parse_law(f.prior) != chain.prior.law)
    throw std::runtime_error("--prior " + f.prior + " does not match the chain (prior=" +
                             std::string(to_string(chain.prior.law)) + ")");
  f.order = chain.history_length;
  const auto train = load_at_order(f.data, f.order).with_num_classes(chain.classes);
  const auto grouping = build_grouping(train);
  if (grouping.size() != chain.groups)
    throw std::runtime_error("chain has G=" + std::to_string(chain.groups) + " but the training data gives G=" +
                             std::to_string(grouping.size()) + "; was it trained on '" + f.data + "'?");
  const auto test = load_at_order(test_path, f.order);
  const auto preds = predict_all(test, chain, grouping, f.seed, threads);
  const std::vector<std::string> pre = {
      provenance("predict", {{"data", f.data},
                             {"order", std::to_string(f.order)},
                             {"chain", chain_path},
                             {"test", test_path},
                             {"seed", std::to_string(f.seed)}}),
      "columns: p(1).. p(K) argmax"};
  Output out(f.out);
  write_predictions(out.stream(), preds, pre);
  out.close();
}

std::vector<int> read_truths(const std::string& path) {
  const auto data = read_dataset_file(path);
  return {data.responses().begin(), data.responses().end()};
}

void cmd_evaluate(const std::string& preds_path, const std::string& truth_path, const std::string& out_path) {
  std::ifstream in(preds_path);
  if (!in) throw std::runtime_error("cannot open predictions file '" + preds_path + "'");
  const auto preds = read_predictions(in, preds_path);
  const auto truths = read_truths(truth_path);
  Output out(out_path);
  out.stream() << std::setprecision(10) << "error_rate=" << error_rate(preds, truths) << " amlp=" << amlp(preds, truths)
               << '\n';
  out.close();
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> orders;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int o = 0;
    try {
      o = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || o < 1) throw std::runtime_error("malformed --orders entry '" + tok + "'");
    orders.push_back(o);
  }
  if (orders.empty()) throw std::runtime_error("--orders is empty");
  return orders;
}

void cmd_sweep(const TrainFlags& f, const std::string& test_path, const std::string& orders_text, unsigned threads) {
  const auto orders = parse_orders(orders_text);
  const auto prior = PriorSpec::for_law(parse_law(f.prior));
  const auto cfg = mcmc_config(f);
  Output out(f.out);
  auto& os = out.stream();
  auto flags = train_flag_list(f);
  flags.erase(flags.begin() + 1);
  flags.emplace_back("test", test_path);
  flags.emplace_back("orders", orders_text);
  os << "# " << provenance("sweep", flags) << '\n';
  os << "# order G originals ratio train_seconds predict_seconds error_rate amlp\n";
  for (int o : orders) {
    const auto train = load_at_order(f.data, o);
    const auto test = load_at_order(test_path, o);
    const auto grouping = build_grouping(train);
    Rng rng(f.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto chain = run_chain(train, grouping, prior, cfg, rng);
    const auto t1 = std::chrono::steady_clock::now();
    const auto preds = predict_all(test, chain, grouping, f.seed, threads);
    const auto t2 = std::chrono::steady_clock::now();
    const std::vector<int> truths(test.responses().begin(), test.responses().end());
    os << o << ' ' << grouping.size() << ' ' << grouping.original_parameter_count() << ' ' << std::setprecision(6)
       << grouping.compression_ratio() << ' ' << std::chrono::duration<double>(t1 - t0).count() << ' '
       << std::chrono::duration<double>(t2 - t1).count() << ' ' << error_rate(preds, truths) << ' '
       << amlp(preds, truths) << '\n';
    os.flush();
  }
  out.close();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian logistic sequence prediction with compressed parameters"};
  app.set_version_flag("--version", std::string(seqcomp::kVersion));
  app.require_subcommand(1);

  // simulate-hmm
  std::size_t sim_n = 5500, sim_len = 21;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate-hmm", "generate binary sequences from the 8-state hidden Markov source");
  sim->add_option("--n", sim_n, "number of sequences")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--length", sim_len, "sequence length (history O = length - 1)")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  sim->add_option("--seed", sim_seed, "random seed")->capture_default_str();
  sim->add_option("--out", sim_out, "output dataset file (stdout if omitted)");

  // encode-text
  std::string enc_text, enc_out, enc_test;
  int enc_order = 20;
  std::size_t enc_train = 0;
  auto* enc = app.add_subcommand("encode-text", "encode text as vowel/consonant/other states and window it");
  enc->add_option("--text", enc_text, "input text file")->required()->check(CLI::ExistingFile);
  enc->add_option("--order", enc_order, "history length of each window")->capture_default_str()->check(CLI::PositiveNumber);
  enc->add_option("--n-train", enc_train, "write the first N windows to --out and the rest to --test-out");
  enc->add_option("--out", enc_out, "output dataset file (stdout if omitted)");
  enc->add_option("--test-out", enc_test, "dataset file for the windows after the first --n-train");

  // group-stats
  std::string gs_data, gs_out;
  int gs_order = 0;
  auto* gs = app.add_subcommand("group-stats", "report superpatterns, expressions and the compression ratio");
  gs->add_option("--data", gs_data, "training dataset file")->required()->check(CLI::ExistingFile);
  gs->add_option("--order", gs_order, "history length O (default: all positions in the file)");
  gs->add_option("--out", gs_out, "output file (stdout if omitted)");

  // train
  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "run the MCMC sampler over compressed parameters");
  add_train_flags(train, train_flags);

  // predict
  TrainFlags pred_flags;
  pred_flags.prior.clear();
  std::string pred_chain, pred_test;
  unsigned pred_threads = 1;
  auto* pred = app.add_subcommand("predict", "predictive probabilities for test histories");
  pred->add_option("--data", pred_flags.data, "training dataset the chain was trained on")
      ->required()
      ->check(CLI::ExistingFile);
  pred->add_option("--order", pred_flags.order, "history length O (must match the chain)");
  pred->add_option("--prior", pred_flags.prior, "prior law (must match the chain)")
      ->check(CLI::IsMember({"cauchy", "gaussian"}));
  pred->add_option("--chain", pred_chain, "chain file from train")->required()->check(CLI::ExistingFile);
  pred->add_option("--test", pred_test, "test dataset file")->required()->check(CLI::ExistingFile);
  pred->add_option("--seed", pred_flags.seed, "random seed for split and prior draws")->capture_default_str();
  pred->add_option("--threads", pred_threads, "worker threads (output does not depend on it)")->capture_default_str();
  pred->add_option("--out", pred_flags.out, "output predictions file (stdout if omitted)");

  // evaluate
  std::string ev_preds, ev_truth, ev_out;
  auto* ev = app.add_subcommand("evaluate", "error rate and average minus log probability");
  ev->add_option("--preds", ev_preds, "predictions file")->required()->check(CLI::ExistingFile);
  ev->add_option("--truth", ev_truth, "dataset file holding the true responses")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", ev_out, "output file (stdout if omitted)");

  // sweep
  TrainFlags sw_flags;
  std::string sw_test, sw_orders = "1,2,3,4,5,7,10,12,15,17,20";
  unsigned sw_threads = 1;
  auto* sw = app.add_subcommand("sweep", "train, predict and evaluate for each order in --orders");
  add_train_flags(sw, sw_flags);
  sw->add_option("--test", sw_test, "test dataset file")->required()->check(CLI::ExistingFile);
  sw->add_option("--orders", sw_orders, "comma-separated history lengths")->capture_default_str();
  sw->add_option("--threads", sw_threads, "prediction worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) cmd_simulate_hmm(sim_n, sim_len, sim_seed, sim_out);
    else if (*enc) cmd_encode_text(enc_text, enc_order, enc_train, enc_out, enc_test);
    else if (*gs) cmd_group_stats(gs_data, gs_order, gs_out);
    else if (*train) cmd_train(train_flags);
    else if (*pred) cmd_predict(pred_flags, pred_chain, pred_test, pred_threads);
    else if (*ev) cmd_evaluate(ev_preds, ev_truth, ev_out);
    else if (*sw) cmd_sweep(sw_flags, sw_test, sw_orders, sw_threads);
  } catch (const std::exception& e) {
    std::cerr << "seqcomp: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
