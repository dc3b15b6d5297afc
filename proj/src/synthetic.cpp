#include "lsr/synthetic.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace lsr {

namespace {

struct DocBuilder {
  const GeneratorSpec& spec;
  std::mt19937_64& rng;
  std::vector<std::vector<std::string>> sent_tokens;
  std::vector<std::set<int>> sent_entities;
  std::vector<std::vector<Mention>> mentions;  // per entity
  std::vector<std::string> entity_name;
  std::set<std::pair<int, int>> forbidden;  // unordered inter pairs
  std::set<RelationFact> facts;
  std::vector<RelationFact> inter_tagged;

  DocBuilder(const GeneratorSpec& s, std::mt19937_64& r) : spec(s), rng(r) {
    sent_tokens.resize(spec.sentences_per_doc);
    sent_entities.resize(spec.sentences_per_doc);
    mentions.resize(spec.entities_per_doc);
  }

  int rand_int(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

  static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

  bool co_sentential(int a, int b) const {
    for (const auto& s : sent_entities)
      if (s.count(a) && s.count(b)) return true;
    return false;
  }

  bool can_place(int entity, int sentence) const {
    for (int other : sent_entities[sentence]) {
      if (other != entity && forbidden.count(key(entity, other))) return false;
    }
    return true;
  }

  void place_mention(int entity, int sentence) {
    int pos = static_cast<int>(sent_tokens[sentence].size());
    sent_tokens[sentence].push_back(entity_name[entity]);
    Mention m;
    m.entity_id = entity;
    m.sentence_index = sentence;
    m.start = pos;
    m.end = pos + 1;
    mentions[entity].push_back(m);
    sent_entities[sentence].insert(entity);
  }

  void place_trigger(int relation, int sentence) {
    sent_tokens[sentence].push_back("trig" + std::to_string(relation));
  }

  bool try_bridge() {
    const int e = spec.entities_per_doc, s = spec.sentences_per_doc;
    for (int attempt = 0; attempt < 200; ++attempt) {
      int a = rand_int(e), b = rand_int(e), c = rand_int(e);
      if (a == b || b == c || a == c) continue;
      int sa = rand_int(s), sb = rand_int(s);
      if (sa == sb) continue;
      if (forbidden.count(key(a, b)) || forbidden.count(key(b, c))) continue;
      if (forbidden.count(key(a, c))) continue;
      if (!can_place(a, sa) || !can_place(b, sa) || !can_place(b, sb) || !can_place(c, sb))
        continue;
      // the pair (a, c) must never share a sentence, now or before
      if (co_sentential(a, c)) continue;
      if (sent_entities[sa].count(c) || sent_entities[sb].count(a)) continue;
      int r = rand_int(spec.num_relations);
      place_mention(a, sa);
      place_trigger(r, sa);
      place_mention(b, sa);
      place_mention(b, sb);
      place_trigger(r, sb);
      place_mention(c, sb);
      facts.insert({a, b, r});
      facts.insert({b, c, r});
      RelationFact bridge{a, c, r};
      if (facts.insert(bridge).second) inter_tagged.push_back(bridge);
      forbidden.insert(key(a, c));
      return true;
    }
    return false;
  }

  bool try_intra() {
    const int e = spec.entities_per_doc, s = spec.sentences_per_doc;
    for (int attempt = 0; attempt < 200; ++attempt) {
      int a = rand_int(e), b = rand_int(e);
      if (a == b) continue;
      if (forbidden.count(key(a, b))) continue;
      int sa = rand_int(s);
      if (!can_place(a, sa) || !can_place(b, sa)) continue;
      int r = rand_int(spec.num_relations);
      place_mention(a, sa);
      place_trigger(r, sa);
      place_mention(b, sa);
      facts.insert({a, b, r});
      return true;
    }
    return false;
  }

  Document finish(const std::string& doc_id) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // every entity needs at least one mention
    for (int e = 0; e < spec.entities_per_doc; ++e) {
      if (!mentions[e].empty()) continue;
      for (int attempt = 0; attempt < 200; ++attempt) {
        int sa = rand_int(spec.sentences_per_doc);
        if (!can_place(e, sa)) continue;
        place_mention(e, sa);
        break;
      }
      if (mentions[e].empty()) {
        throw DataError("synthetic generator: could not place entity " + std::to_string(e));
      }
    }
    for (int s = 0; s < spec.sentences_per_doc; ++s) {
      int fill = spec.filler_tokens_per_sentence + (sent_tokens[s].empty() ? 1 : 0);
      for (int i = 0; i < fill; ++i) {
        sent_tokens[s].push_back("w" + std::to_string(rand_int(spec.vocab_size)));
      }
    }
    Document doc;
    doc.doc_id = doc_id;
    for (int s = 0; s < spec.sentences_per_doc; ++s) {
      Sentence sent;
      sent.tokens = sent_tokens[s];
      sent.dep_head = random_tree(static_cast<int>(sent.tokens.size()));
      doc.sentences.push_back(std::move(sent));
    }
    for (int e = 0; e < spec.entities_per_doc; ++e) {
      Entity ent;
      ent.id = e;
      ent.mentions = mentions[e];
      doc.entities.push_back(std::move(ent));
    }
    doc.facts.assign(facts.begin(), facts.end());
    validate(doc);
    return doc;
  }

  std::vector<int> random_tree(int len) {
    std::vector<int> head(len, 0);
    if (len <= 1) return head;
    std::vector<int> order(len);
    for (int i = 0; i < len; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> placed{order[0]};  // order[0] is the root, head 0
    for (int i = 1; i < len; ++i) {
      int parent = placed[rand_int(static_cast<int>(placed.size()))];
      head[order[i]] = parent + 1;
      placed.push_back(order[i]);
    }
    return head;
  }
};

}  // namespace

Corpus generate_synthetic_corpus(const GeneratorSpec& spec, std::uint64_t seed,
                                 SyntheticTags* tags) {
  if (spec.entities_per_doc > spec.vocab_size) {
    throw DataError("synthetic generator: more entities per doc than vocabulary words");
  }
  if (spec.num_relations < 1 || spec.entities_per_doc < 2 || spec.sentences_per_doc < 1) {
    throw DataError("synthetic generator: infeasible spec");
  }
  if (spec.bridge_prob > 0.0 &&
      (spec.entities_per_doc < 3 || spec.sentences_per_doc < 2)) {
    throw DataError(
        "synthetic generator: bridge facts need >= 3 entities and >= 2 sentences");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Corpus corpus;
  for (int d = 0; d < spec.num_docs; ++d) {
    DocBuilder b(spec, rng);
    // entity surface tokens: distinct vocabulary words per document
    std::set<int> used;
    for (int e = 0; e < spec.entities_per_doc; ++e) {
      int w;
      do {
        w = b.rand_int(spec.vocab_size);
      } while (!used.insert(w).second);
      b.entity_name.push_back("w" + std::to_string(w));
    }
    for (int f = 0; f < spec.facts_per_doc; ++f) {
      bool want_bridge = unit(rng) < spec.bridge_prob;
      if (want_bridge) {
        if (!b.try_bridge()) b.try_intra();
      } else {
        b.try_intra();
      }
    }
    Document doc = b.finish("syn" + std::to_string(d));
    if (tags) {
      for (const RelationFact& f : b.inter_tagged) tags->inter_facts.push_back({d, f});
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace lsr
