#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "lsr/docmodel.hpp"
#include "lsr/metrics.hpp"
#include "lsr/synthetic.hpp"

using namespace lsr;

namespace {

Sentence chain_sentence(int len) {
  // token i hangs off token i-1; token 0 is the root
  Sentence s;
  for (int i = 0; i < len; ++i) {
    s.tokens.push_back("t" + std::to_string(i));
    s.dep_head.push_back(i);  // 1-based head = i, so 0 for the first token
  }
  return s;
}

Document tiny_doc() {
  Document doc;
  doc.doc_id = "fixture";
  Sentence s0;
  s0.tokens = {"alice", "met", "bob", "today"};
  s0.dep_head = {2, 0, 2, 2};
  Sentence s1;
  s1.tokens = {"bob", "lives", "in", "paris"};
  s1.dep_head = {2, 0, 2, 3};
  doc.sentences = {s0, s1};
  Entity a;
  a.id = 0;
  a.mentions = {{0, 0, 0, 1}};
  Entity b;
  b.id = 1;
  b.mentions = {{1, 0, 2, 3}, {1, 1, 0, 1}};
  Entity p;
  p.id = 2;
  p.mentions = {{2, 1, 3, 4}};
  doc.entities = {a, b, p};
  doc.facts = {{0, 1, 0}, {1, 2, 1}};
  return doc;
}

std::string temp_path(const char* stem) {
  return std::string("/tmp/lsr_docmodel_") + stem;
}

// Independent path oracle: climb from each endpoint to the root, then
// splice the two root-paths at their lowest common ancestor.
std::vector<int> lca_path(const Sentence& s, int a, int b) {
  auto to_root = [&](int t) {
    std::vector<int> up{t};
    while (s.dep_head[up.back()] != 0) up.push_back(s.dep_head[up.back()] - 1);
    return up;
  };
  std::vector<int> pa = to_root(a), pb = to_root(b);
  std::set<int> in_pa(pa.begin(), pa.end());
  int lca = -1;
  for (int t : pb) {
    if (in_pa.count(t)) {
      lca = t;
      break;
    }
  }
  std::vector<int> path;
  for (int t : pa) {
    path.push_back(t);
    if (t == lca) break;
  }
  std::vector<int> tail;
  for (int t : pb) {
    if (t == lca) break;
    tail.push_back(t);
  }
  std::reverse(tail.begin(), tail.end());
  path.insert(path.end(), tail.begin(), tail.end());
  return path;
}

Sentence random_tree_sentence(int len, std::mt19937_64& rng) {
  Sentence s;
  s.tokens.assign(len, "w");
  s.dep_head.assign(len, 0);
  for (int i = 1; i < len; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    s.dep_head[i] = pick(rng) + 1;
  }
  return s;
}

}  // namespace

TEST_CASE("fixture document validates") { CHECK_NOTHROW(validate(tiny_doc())); }

TEST_CASE("validation rejects bad documents with named rules") {
  Document doc = tiny_doc();
  doc.facts.push_back({0, 5, 0});
  CHECK_THROWS_WITH_AS(validate(doc), doctest::Contains("unknown entity"), DataError);

  doc = tiny_doc();
  doc.facts.push_back({0, 0, 1});
  CHECK_THROWS_WITH_AS(validate(doc), doctest::Contains("head equals tail"), DataError);

  doc = tiny_doc();
  doc.facts.push_back(doc.facts[0]);
  CHECK_THROWS_WITH_AS(validate(doc), doctest::Contains("duplicate fact"), DataError);

  doc = tiny_doc();
  doc.entities[0].mentions[0].end = 99;
  CHECK_THROWS_AS(validate(doc), DataError);

  doc = tiny_doc();
  doc.entities.push_back({3, {}});
  CHECK_THROWS_WITH_AS(validate(doc), doctest::Contains("no mentions"), DataError);

  doc = tiny_doc();
  doc.entities[0].mentions[0] = {0, 0, 2, 4};  // overlaps bob's mention at [2,3)
  CHECK_THROWS_WITH_AS(validate(doc), doctest::Contains("overlapping"), DataError);
}

TEST_CASE("tree invariant rejects cycles and multiple roots") {
  Document doc = tiny_doc();
  doc.sentences[0].dep_head = {2, 1, 2, 2};  // tokens 0 and 1 point at each other
  CHECK_THROWS_AS(validate(doc), DataError);

  doc = tiny_doc();
  doc.sentences[0].dep_head = {0, 0, 2, 2};  // two roots
  CHECK_THROWS_AS(validate(doc), DataError);

  doc = tiny_doc();
  doc.sentences[0].dep_head = {2, 0, 2, 9};  // head out of range
  CHECK_THROWS_AS(validate(doc), DataError);
}

TEST_CASE("empty corpus file loads as empty corpus") {
  std::string path = temp_path("empty.jsonl");
  { std::ofstream(path) << "[]\n"; }
  CHECK(load_corpus(path).empty());
  std::remove(path.c_str());
}

TEST_CASE("corpus round-trips field for field") {
  std::string path = temp_path("roundtrip.jsonl");
  Corpus corpus{tiny_doc()};
  save_corpus(corpus, path);
  Corpus back = load_corpus(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == 1);
  const Document& d = back[0];
  CHECK(d.doc_id == "fixture");
  REQUIRE(d.sentences.size() == 2);
  CHECK(d.sentences[0].tokens == corpus[0].sentences[0].tokens);
  CHECK(d.sentences[1].dep_head == corpus[0].sentences[1].dep_head);
  REQUIRE(d.entities.size() == 3);
  CHECK(d.entities[1].mentions.size() == 2);
  CHECK(d.entities[1].mentions[1].sentence_index == 1);
  REQUIRE(d.facts.size() == 2);
  CHECK(d.facts[0] == corpus[0].facts[0]);
  CHECK(d.facts[1] == corpus[0].facts[1]);
}

TEST_CASE("loading a fact with an unknown entity id fails") {
  std::string path = temp_path("badfact.jsonl");
  Document doc = tiny_doc();
  doc.facts[0].tail = 42;
  {
    Corpus c{doc};
    std::ofstream out(path);
    out << R"({"doc_id":"x","sentences":[{"tokens":["a"],"dep_head":[0]}],)"
        << R"("entities":[{"id":0,"mentions":[{"sent":0,"start":0,"end":1}]}],)"
        << R"("facts":[{"h":0,"t":42,"r":0}]})" << "\n";
  }
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("unknown entity"), DataError);
  std::remove(path.c_str());
}

TEST_CASE("shortest path identity case") {
  Sentence s = chain_sentence(4);
  CHECK(shortest_dep_path(s, 2, 2) == std::vector<int>{2});
}

TEST_CASE("shortest path on a chain") {
  Sentence s = chain_sentence(4);
  CHECK(shortest_dep_path(s, 0, 3) == std::vector<int>({0, 1, 2, 3}));
}

TEST_CASE("shortest path on a star") {
  Sentence s;
  s.tokens = {"r", "x", "y"};
  s.dep_head = {0, 1, 1};
  CHECK(shortest_dep_path(s, 1, 2) == std::vector<int>({1, 0, 2}));
}

TEST_CASE("shortest path rejects out-of-range indices") {
  Sentence s = chain_sentence(3);
  CHECK_THROWS_AS(shortest_dep_path(s, 0, 7), DataError);
}

TEST_CASE("shortest path matches the LCA oracle on 100 random trees") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<int> len_dist(5, 40);
    int len = len_dist(rng);
    Sentence s = random_tree_sentence(len, rng);
    std::uniform_int_distribution<int> tok(0, len - 1);
    int a = tok(rng), b = tok(rng);
    CHECK(shortest_dep_path(s, a, b) == lca_path(s, a, b));
  }
}

TEST_CASE("mention anchor is the span token whose head leaves the span") {
  Sentence s;
  s.tokens = {"the", "big", "dog", "ran"};
  s.dep_head = {3, 3, 4, 0};  // the->dog, big->dog, dog->ran, ran=root
  Mention m{0, 0, 0, 3};
  CHECK(mention_anchor(s, m) == 2);
}

TEST_CASE("mdp with fewer than two mentions is empty") {
  Sentence s = chain_sentence(6);
  CHECK(extract_mdp(s, {}).empty());
  CHECK(extract_mdp(s, {Mention{0, 0, 1, 2}}).empty());
}

TEST_CASE("mdp on an 8-token chain with mentions at 2 and 7") {
  Sentence s = chain_sentence(8);
  std::vector<Mention> ms{{0, 0, 2, 3}, {1, 0, 7, 8}};
  CHECK(extract_mdp(s, ms) == std::vector<int>({3, 4, 5, 6}));
}

TEST_CASE("adjacent mentions leave an empty mdp") {
  Sentence s = chain_sentence(4);
  std::vector<Mention> ms{{0, 0, 0, 2}, {1, 0, 2, 4}};
  CHECK(extract_mdp(s, ms).empty());
}

TEST_CASE("mdp never intersects mention spans and stays on the path union") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<int> len_dist(5, 40);
    int len = len_dist(rng);
    Sentence s = random_tree_sentence(len, rng);
    std::uniform_int_distribution<int> nm(2, 4);
    int mentions = nm(rng);
    std::vector<Mention> ms;
    std::set<int> taken;
    for (int m = 0; m < mentions; ++m) {
      std::uniform_int_distribution<int> tok(0, len - 1);
      int t = tok(rng);
      if (taken.count(t)) continue;
      taken.insert(t);
      ms.push_back({m, 0, t, t + 1});
    }
    if (ms.size() < 2) continue;

    // oracle: pairwise LCA paths, minus span tokens
    std::set<int> expect;
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = i + 1; j < ms.size(); ++j)
        for (int t : lca_path(s, ms[i].start, ms[j].start)) expect.insert(t);
    for (const Mention& m : ms)
      for (int t = m.start; t < m.end; ++t) expect.erase(t);

    std::vector<int> got = extract_mdp(s, ms);
    CHECK(got == std::vector<int>(expect.begin(), expect.end()));
    for (int t : got)
      for (const Mention& m : ms) CHECK((t < m.start || t >= m.end));
  }
}

TEST_CASE("node plan counts and ordering") {
  Document doc = tiny_doc();
  NodePlan plan = build_node_plan(doc, GraphMode::WithMdp);
  int mentions = 0, entities = 0, mdp = 0;
  for (const NodeDescriptor& n : plan.nodes) {
    if (n.kind == NodeKind::Mention) ++mentions;
    if (n.kind == NodeKind::Entity) ++entities;
    if (n.kind == NodeKind::Mdp) ++mdp;
  }
  CHECK(mentions == 4);
  CHECK(entities == 3);
  CHECK(plan.n() == mentions + entities + mdp);
  // mentions first (document order), then entities by id, then mdp tokens
  CHECK(plan.nodes[0].kind == NodeKind::Mention);
  CHECK(plan.nodes[mentions].kind == NodeKind::Entity);
  for (int i = 0; i + 1 < mentions; ++i) {
    const Mention& a = plan.mention_order[i];
    const Mention& b = plan.mention_order[i + 1];
    CHECK((a.sentence_index < b.sentence_index ||
           (a.sentence_index == b.sentence_index && a.start <= b.start)));
  }
  for (int i = 0; i < entities - 1; ++i) {
    CHECK(plan.nodes[mentions + i].entity_id < plan.nodes[mentions + i + 1].entity_id);
  }
}

TEST_CASE("full-tokens mode keeps mention and entity nodes and adds every token") {
  Document doc = tiny_doc();
  NodePlan plan = build_node_plan(doc, GraphMode::FullyConnectedTokens);
  int tokens = 0;
  for (const Sentence& s : doc.sentences) tokens += static_cast<int>(s.tokens.size());
  CHECK(plan.n() == 4 + 3 + tokens);
}

TEST_CASE("node plan is a pure function of its input") {
  Document doc = tiny_doc();
  NodePlan p1 = build_node_plan(doc, GraphMode::WithMdp);
  NodePlan p2 = build_node_plan(doc, GraphMode::WithMdp);
  REQUIRE(p1.n() == p2.n());
  for (int i = 0; i < p1.n(); ++i) {
    CHECK(p1.nodes[i].kind == p2.nodes[i].kind);
    CHECK(p1.nodes[i].mention_index == p2.nodes[i].mention_index);
    CHECK(p1.nodes[i].entity_id == p2.nodes[i].entity_id);
    CHECK(p1.nodes[i].sentence == p2.nodes[i].sentence);
    CHECK(p1.nodes[i].token == p2.nodes[i].token);
  }
}

TEST_CASE("synthetic generator is deterministic") {
  GeneratorSpec spec;
  spec.num_docs = 10;
  Corpus a = generate_synthetic_corpus(spec, 5);
  Corpus b = generate_synthetic_corpus(spec, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].doc_id == b[i].doc_id);
    REQUIRE(a[i].sentences.size() == b[i].sentences.size());
    for (std::size_t s = 0; s < a[i].sentences.size(); ++s) {
      CHECK(a[i].sentences[s].tokens == b[i].sentences[s].tokens);
      CHECK(a[i].sentences[s].dep_head == b[i].sentences[s].dep_head);
    }
    CHECK(a[i].facts == b[i].facts);
  }
}

TEST_CASE("every tagged inter fact truly spans sentences") {
  GeneratorSpec spec;
  spec.num_docs = 40;
  spec.bridge_prob = 0.7;
  SyntheticTags tags;
  Corpus corpus = generate_synthetic_corpus(spec, 11, &tags);
  CHECK(!tags.inter_facts.empty());
  for (const auto& [doc_idx, fact] : tags.inter_facts) {
    CHECK(!pair_is_intra(corpus[doc_idx], fact.head, fact.tail));
  }
}

TEST_CASE("bridge probability zero yields only intra facts") {
  GeneratorSpec spec;
  spec.num_docs = 30;
  spec.bridge_prob = 0.0;
  SyntheticTags tags;
  Corpus corpus = generate_synthetic_corpus(spec, 3, &tags);
  CHECK(tags.inter_facts.empty());
  for (const Document& doc : corpus) {
    for (const RelationFact& f : doc.facts) {
      CHECK(pair_is_intra(doc, f.head, f.tail));
    }
  }
}

TEST_CASE("synthetic documents pass validation and load back") {
  GeneratorSpec spec;
  spec.num_docs = 15;
  Corpus corpus = generate_synthetic_corpus(spec, 9);
  for (const Document& doc : corpus) CHECK_NOTHROW(validate(doc));
  std::string path = temp_path("synth.jsonl");
  save_corpus(corpus, path);
  Corpus back = load_corpus(path);
  std::remove(path.c_str());
  CHECK(back.size() == corpus.size());
}

TEST_CASE("infeasible generator spec is rejected") {
  GeneratorSpec spec;
  spec.vocab_size = 1;
  spec.entities_per_doc = 50;
  CHECK_THROWS_AS(generate_synthetic_corpus(spec, 1), DataError);
}
