#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsr/harness.hpp"
#include "lsr/synthetic.hpp"

namespace {

using namespace lsr;
using nlohmann::json;

int cmd_gen_synthetic(const GeneratorSpec& spec, std::uint64_t seed,
                      const std::string& out_path) {
  Corpus corpus = generate_synthetic_corpus(spec, seed);
  save_corpus(corpus, out_path);
  std::cout << "wrote " << corpus.size() << " documents to " << out_path << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<std::string> mode, std::optional<int> blocks,
              const std::string& out_path) {
  RunConfig config = load_run_config(config_path);
  if (seed) config.seed = *seed;
  if (mode) config.mode = *mode;
  if (blocks) config.blocks = *blocks;
  config.graph_mode();  // validate

  std::ofstream log(out_path + ".log.jsonl");
  TrainResult result = train(config, [&](const std::string& line) {
    log << line << "\n";
    std::cout << line << "\n";
  });
  save_checkpoint(result.best, out_path);
  std::ofstream metrics(out_path + ".metrics.json");
  MetricsReport best = result.epochs[result.best.epoch - 1].dev_metrics;
  metrics << metrics_to_json(best) << "\n";
  std::cout << "best epoch " << result.best.epoch << " dev F1 " << best.f1 << "\n";
  return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& corpus_path,
                const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Corpus corpus = load_corpus(corpus_path);
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write: " + out_path);
  for (const ScoredFact& f : predict(ckpt, corpus)) {
    json j{{"doc_id", f.doc_id}, {"h", f.head}, {"t", f.tail}, {"r", f.relation},
           {"score", f.score}};
    out << j.dump() << "\n";
  }
  return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& corpus_path,
             const std::string& train_path, bool repick_threshold,
             const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Corpus corpus = load_corpus(corpus_path);
  std::set<std::string> train_keys;
  if (!train_path.empty()) train_keys = train_fact_keys(load_corpus(train_path));
  std::vector<ScoredFact> scored = predict(ckpt, corpus);
  double theta = repick_threshold ? pick_threshold(scored, corpus) : ckpt.threshold;
  MetricsReport report = evaluate(apply_threshold(scored, theta), corpus, train_keys);
  report.threshold = theta;
  const std::string text = metrics_to_json(report);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write: " + out_path);
    out << text << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

int cmd_induce_structure(const std::string& ckpt_path, const std::string& corpus_path,
                         const std::string& doc_id, const std::string& out_path) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Corpus corpus = load_corpus(corpus_path);
  const Document* doc = nullptr;
  if (doc_id.empty()) {
    doc = &corpus.front();
  } else {
    for (const Document& d : corpus)
      if (d.doc_id == doc_id) doc = &d;
    if (!doc) throw DataError("doc id not found in corpus: " + doc_id);
  }
  const std::string dump = induce_structure_dump(ckpt, *doc);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write: " + out_path);
    out << dump << "\n";
  } else {
    std::cout << dump << "\n";
  }
  return 0;
}

int cmd_oracle_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double max_dev = 0.0;
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      ScoreSet scores;
      scores.s = Tensor::zeros({n, n});
      scores.s_root = Tensor::zeros({n});
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) scores.s.at(i, j) = gauss(rng);
      for (int j = 0; j < n; ++j) scores.s_root[j] = gauss(rng);
      Tensor P = edge_weights(scores);
      Tensor rw = Tensor::zeros({n});
      const double c = stability_shift(scores);
      for (int j = 0; j < n; ++j) rw[j] = std::exp(scores.s_root[j] - c);
      StructureMarginals fast = marginals(P, rw);
      StructureMarginals slow = brute_force_marginals(P, rw);
      for (std::size_t i = 0; i < fast.A.numel(); ++i)
        max_dev = std::max(max_dev, std::abs(fast.A[i] - slow.A[i]));
      for (int j = 0; j < n; ++j)
        max_dev = std::max(max_dev, std::abs(fast.root[j] - slow.root[j]));
    }
  }
  std::cout << "max marginal deviation vs brute-force oracle: " << max_dev << "\n";
  return max_dev < 1e-8 ? 0 : 2;
}

// DocRED ships tokenized sentences and entity clusters but no dependency
// heads; heads come from a sidecar JSONL ({"title":..., "dep_heads":[[...]]}).
int cmd_convert_docred(const std::string& in_path, const std::string& heads_path,
                       const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw DataError("cannot open DocRED file: " + in_path);
  json docs;
  try {
    docs = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("DocRED file: invalid JSON: " + std::string(e.what()));
  }
  std::map<std::string, std::vector<std::vector<int>>> heads;
  {
    std::ifstream hin(heads_path);
    if (!hin) throw DataError("cannot open dep-head sidecar: " + heads_path);
    std::string line;
    while (std::getline(hin, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      heads[j.at("title").get<std::string>()] =
          j.at("dep_heads").get<std::vector<std::vector<int>>>();
    }
  }
  std::map<std::string, int> relation_ids;
  Corpus corpus;
  for (const auto& jd : docs) {
    Document doc;
    doc.doc_id = jd.at("title").get<std::string>();
    auto hit = heads.find(doc.doc_id);
    if (hit == heads.end()) {
      std::cerr << "warning: no dependency heads for '" << doc.doc_id << "', skipped\n";
      continue;
    }
    const auto& sents = jd.at("sents");
    for (std::size_t s = 0; s < sents.size(); ++s) {
      Sentence sent;
      sent.tokens = sents[s].get<std::vector<std::string>>();
      if (s >= hit->second.size() || hit->second[s].size() != sent.tokens.size()) {
        throw DataError("doc " + doc.doc_id + ": sidecar heads do not match sentence " +
                        std::to_string(s));
      }
      sent.dep_head = hit->second[s];
      doc.sentences.push_back(std::move(sent));
    }
    const auto& vertex_set = jd.at("vertexSet");
    for (std::size_t e = 0; e < vertex_set.size(); ++e) {
      Entity ent;
      ent.id = static_cast<int>(e);
      for (const auto& jm : vertex_set[e]) {
        Mention m;
        m.entity_id = ent.id;
        m.sentence_index = jm.at("sent_id").get<int>();
        m.start = jm.at("pos")[0].get<int>();
        m.end = jm.at("pos")[1].get<int>();
        ent.mentions.push_back(m);
      }
      doc.entities.push_back(std::move(ent));
    }
    if (jd.contains("labels")) {
      for (const auto& jl : jd.at("labels")) {
        const std::string rname = jl.at("r").get<std::string>();
        auto [it, inserted] =
            relation_ids.emplace(rname, static_cast<int>(relation_ids.size()));
        (void)inserted;
        RelationFact f;
        f.head = jl.at("h").get<int>();
        f.tail = jl.at("t").get<int>();
        f.relation = it->second;
        doc.facts.push_back(f);
      }
    }
    validate(doc);
    corpus.push_back(std::move(doc));
  }
  save_corpus(corpus, out_path);
  std::cout << "converted " << corpus.size() << " documents, "
            << relation_ids.size() << " relation types\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-structure relation extraction engine"};
  app.require_subcommand(1);

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic corpus");
  GeneratorSpec spec;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "corpus.jsonl";
  gen->add_option("--docs", spec.num_docs);
  gen->add_option("--sentences", spec.sentences_per_doc);
  gen->add_option("--entities", spec.entities_per_doc);
  gen->add_option("--vocab", spec.vocab_size);
  gen->add_option("--relations", spec.num_relations);
  gen->add_option("--bridge-prob", spec.bridge_prob);
  gen->add_option("--facts", spec.facts_per_doc);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out);

  // train
  auto* tr = app.add_subcommand("train", "train a model");
  std::string train_config;
  std::optional<std::uint64_t> train_seed;
  std::optional<std::string> train_mode;
  std::optional<int> train_blocks;
  std::string train_out = "model.ckpt";
  tr->add_option("--config", train_config)->required();
  tr->add_option("--seed", train_seed);
  tr->add_option("--mode", train_mode)
      ->check(CLI::IsMember({"with-mdp", "full-tokens"}));
  tr->add_option("--blocks", train_blocks);
  tr->add_option("--out", train_out);

  // predict
  auto* pr = app.add_subcommand("predict", "score all entity pairs");
  std::string pr_ckpt, pr_corpus, pr_out = "predictions.jsonl";
  pr->add_option("--checkpoint", pr_ckpt)->required();
  pr->add_option("--corpus", pr_corpus)->required();
  pr->add_option("--out", pr_out);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  std::string ev_ckpt, ev_corpus, ev_train, ev_out;
  bool ev_repick = false;
  ev->add_option("--checkpoint", ev_ckpt)->required();
  ev->add_option("--corpus", ev_corpus)->required();
  ev->add_option("--train-corpus", ev_train);
  ev->add_flag("--pick-threshold", ev_repick);
  ev->add_option("--out", ev_out);

  // induce-structure
  auto* is = app.add_subcommand("induce-structure", "dump per-refinement structures");
  std::string is_ckpt, is_corpus, is_doc, is_out;
  is->add_option("--checkpoint", is_ckpt)->required();
  is->add_option("--corpus", is_corpus)->required();
  is->add_option("--doc-id", is_doc);
  is->add_option("--out", is_out);

  // oracle-check
  auto* oc = app.add_subcommand("oracle-check", "compare marginals to brute force");
  std::uint64_t oc_seed = 1;
  oc->add_option("--seed", oc_seed);

  // convert-docred
  auto* cd = app.add_subcommand("convert-docred", "convert DocRED JSON + head sidecar");
  std::string cd_in, cd_heads, cd_out = "docred.jsonl";
  cd->add_option("--in", cd_in)->required();
  cd->add_option("--heads", cd_heads)->required();
  cd->add_option("--out", cd_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_synthetic(spec, gen_seed, gen_out);
    if (tr->parsed())
      return cmd_train(train_config, train_seed, train_mode, train_blocks, train_out);
    if (pr->parsed()) return cmd_predict(pr_ckpt, pr_corpus, pr_out);
    if (ev->parsed()) return cmd_eval(ev_ckpt, ev_corpus, ev_train, ev_repick, ev_out);
    if (is->parsed()) return cmd_induce_structure(is_ckpt, is_corpus, is_doc, is_out);
    if (oc->parsed()) return cmd_oracle_check(oc_seed);
    if (cd->parsed()) return cmd_convert_docred(cd_in, cd_heads, cd_out);
  } catch (const lsr::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
