#include "lsr/docmodel.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>

#include <json.hpp>

namespace lsr {

using nlohmann::json;

const Entity& Document::entity(int id) const {
  for (const Entity& e : entities)
    if (e.id == id) return e;
  throw DataError("doc " + doc_id + ": unknown entity id " + std::to_string(id));
}

namespace {

void check_dep_tree(const std::string& doc_id, int sent_idx, const Sentence& s) {
  const int len = static_cast<int>(s.tokens.size());
  if (static_cast<int>(s.dep_head.size()) != len) {
    throw DataError("doc " + doc_id + " sentence " + std::to_string(sent_idx) +
                    ": dep_head length does not match token count");
  }
  int roots = 0;
  for (int h : s.dep_head) {
    if (h < 0 || h > len) {
      throw DataError("doc " + doc_id + " sentence " + std::to_string(sent_idx) +
                      ": dep_head value out of range");
    }
    if (h == 0) ++roots;
  }
  if (roots != 1) {
    throw DataError("doc " + doc_id + " sentence " + std::to_string(sent_idx) +
                    ": dependency tree must have exactly one root, found " +
                    std::to_string(roots));
  }
  // acyclic + connected: every token must reach the root by following heads
  for (int t = 0; t < len; ++t) {
    int cur = t;
    int steps = 0;
    while (s.dep_head[cur] != 0) {
      cur = s.dep_head[cur] - 1;
      if (++steps > len) {
        throw DataError("doc " + doc_id + " sentence " + std::to_string(sent_idx) +
                        ": dependency heads contain a cycle");
      }
    }
  }
}

}  // namespace

void validate(const Document& doc) {
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (doc.sentences[i].tokens.empty()) {
      throw DataError("doc " + doc.doc_id + " sentence " + std::to_string(i) + ": empty");
    }
    check_dep_tree(doc.doc_id, static_cast<int>(i), doc.sentences[i]);
  }
  std::set<int> entity_ids;
  for (const Entity& e : doc.entities) {
    if (!entity_ids.insert(e.id).second) {
      throw DataError("doc " + doc.doc_id + ": duplicate entity id " + std::to_string(e.id));
    }
    if (e.mentions.empty()) {
      throw DataError("doc " + doc.doc_id + ": entity " + std::to_string(e.id) +
                      " has no mentions");
    }
    for (const Mention& m : e.mentions) {
      if (m.sentence_index < 0 ||
          m.sentence_index >= static_cast<int>(doc.sentences.size())) {
        throw DataError("doc " + doc.doc_id + ": mention sentence index out of range");
      }
      const auto& toks = doc.sentences[m.sentence_index].tokens;
      if (m.start < 0 || m.end > static_cast<int>(toks.size()) || m.start >= m.end) {
        throw DataError("doc " + doc.doc_id + ": mention span [" +
                        std::to_string(m.start) + "," + std::to_string(m.end) +
                        ") invalid in sentence " + std::to_string(m.sentence_index));
      }
    }
  }
  // overlapping mention spans within a sentence are forbidden
  std::vector<std::vector<std::pair<int, int>>> spans(doc.sentences.size());
  for (const Entity& e : doc.entities)
    for (const Mention& m : e.mentions) spans[m.sentence_index].push_back({m.start, m.end});
  for (std::size_t s = 0; s < spans.size(); ++s) {
    auto& v = spans[s];
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].first < v[i - 1].second) {
        throw DataError("doc " + doc.doc_id + ": overlapping mention spans in sentence " +
                        std::to_string(s));
      }
    }
  }
  std::set<RelationFact> seen;
  for (const RelationFact& f : doc.facts) {
    if (!entity_ids.count(f.head) || !entity_ids.count(f.tail)) {
      throw DataError("doc " + doc.doc_id + ": fact references unknown entity");
    }
    if (f.head == f.tail) {
      throw DataError("doc " + doc.doc_id + ": fact head equals tail");
    }
    if (f.relation < 0) {
      throw DataError("doc " + doc.doc_id + ": negative relation id");
    }
    if (!seen.insert(f).second) {
      throw DataError("doc " + doc.doc_id + ": duplicate fact");
    }
  }
}

namespace {

Document parse_document(const json& j) {
  Document doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    for (const auto& js : j.at("sentences")) {
      Sentence s;
      s.tokens = js.at("tokens").get<std::vector<std::string>>();
      s.dep_head = js.at("dep_head").get<std::vector<int>>();
      doc.sentences.push_back(std::move(s));
    }
    for (const auto& je : j.at("entities")) {
      Entity e;
      e.id = je.at("id").get<int>();
      for (const auto& jm : je.at("mentions")) {
        Mention m;
        m.entity_id = e.id;
        m.sentence_index = jm.at("sent").get<int>();
        m.start = jm.at("start").get<int>();
        m.end = jm.at("end").get<int>();
        e.mentions.push_back(m);
      }
      doc.entities.push_back(std::move(e));
    }
    for (const auto& jf : j.at("facts")) {
      RelationFact f;
      f.head = jf.at("h").get<int>();
      f.tail = jf.at("t").get<int>();
      f.relation = jf.at("r").get<int>();
      doc.facts.push_back(f);
    }
  } catch (const json::exception& e) {
    std::string id = j.contains("doc_id") && j["doc_id"].is_string()
                         ? j["doc_id"].get<std::string>()
                         : "<unknown>";
    throw DataError("doc " + id + ": malformed record: " + e.what());
  }
  validate(doc);
  return doc;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
    if (j.is_array() && j.empty()) continue;  // tolerate an empty-array file
    corpus.push_back(parse_document(j));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const Document& doc : corpus) {
    json j;
    j["doc_id"] = doc.doc_id;
    j["sentences"] = json::array();
    for (const Sentence& s : doc.sentences) {
      j["sentences"].push_back({{"tokens", s.tokens}, {"dep_head", s.dep_head}});
    }
    j["entities"] = json::array();
    for (const Entity& e : doc.entities) {
      json je{{"id", e.id}, {"mentions", json::array()}};
      for (const Mention& m : e.mentions) {
        je["mentions"].push_back({{"sent", m.sentence_index}, {"start", m.start}, {"end", m.end}});
      }
      j["entities"].push_back(je);
    }
    j["facts"] = json::array();
    for (const RelationFact& f : doc.facts) {
      j["facts"].push_back({{"h", f.head}, {"t", f.tail}, {"r", f.relation}});
    }
    out << j.dump() << "\n";
  }
}

std::vector<int> shortest_dep_path(const Sentence& sentence, int a, int b) {
  const int len = static_cast<int>(sentence.tokens.size());
  if (a < 0 || a >= len || b < 0 || b >= len) {
    throw DataError("shortest_dep_path: token index out of range");
  }
  if (a == b) return {a};
  std::vector<std::vector<int>> adj(len);
  for (int t = 0; t < len; ++t) {
    int h = sentence.dep_head[t];
    if (h == 0) continue;
    adj[t].push_back(h - 1);
    adj[h - 1].push_back(t);
  }
  std::vector<int> prev(len, -1);
  std::queue<int> q;
  q.push(a);
  prev[a] = a;
  while (!q.empty()) {
    int cur = q.front();
    q.pop();
    if (cur == b) break;
    for (int nb : adj[cur]) {
      if (prev[nb] == -1) {
        prev[nb] = cur;
        q.push(nb);
      }
    }
  }
  if (prev[b] == -1) throw DataError("shortest_dep_path: tree is disconnected");
  std::vector<int> path;
  for (int cur = b; cur != a; cur = prev[cur]) path.push_back(cur);
  path.push_back(a);
  std::reverse(path.begin(), path.end());
  return path;
}

int mention_anchor(const Sentence& sentence, const Mention& mention) {
  for (int t = mention.start; t < mention.end; ++t) {
    int h = sentence.dep_head[t];
    if (h == 0 || h - 1 < mention.start || h - 1 >= mention.end) return t;
  }
  // a span whose tokens all point inside itself would violate the tree
  // invariant; fall back to the first token
  return mention.start;
}

std::vector<int> extract_mdp(const Sentence& sentence,
                             const std::vector<Mention>& mentions) {
  std::set<int> on_path;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    for (std::size_t j = i + 1; j < mentions.size(); ++j) {
      int a = mention_anchor(sentence, mentions[i]);
      int b = mention_anchor(sentence, mentions[j]);
      for (int t : shortest_dep_path(sentence, a, b)) on_path.insert(t);
    }
  }
  for (const Mention& m : mentions) {
    for (int t = m.start; t < m.end; ++t) on_path.erase(t);
  }
  return {on_path.begin(), on_path.end()};
}

NodePlan build_node_plan(const Document& doc, GraphMode mode) {
  NodePlan plan;
  for (const Entity& e : doc.entities)
    for (const Mention& m : e.mentions) plan.mention_order.push_back(m);
  std::sort(plan.mention_order.begin(), plan.mention_order.end(),
            [](const Mention& a, const Mention& b) {
              if (a.sentence_index != b.sentence_index)
                return a.sentence_index < b.sentence_index;
              return a.start < b.start;
            });
  for (std::size_t i = 0; i < plan.mention_order.size(); ++i) {
    NodeDescriptor d;
    d.kind = NodeKind::Mention;
    d.mention_index = static_cast<int>(i);
    d.sentence = plan.mention_order[i].sentence_index;
    d.token = plan.mention_order[i].start;
    plan.nodes.push_back(d);
  }
  std::vector<int> entity_ids;
  for (const Entity& e : doc.entities) entity_ids.push_back(e.id);
  std::sort(entity_ids.begin(), entity_ids.end());
  for (int id : entity_ids) {
    NodeDescriptor d;
    d.kind = NodeKind::Entity;
    d.entity_id = id;
    plan.nodes.push_back(d);
  }
  if (mode == GraphMode::WithMdp) {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      std::vector<Mention> in_sentence;
      for (const Entity& e : doc.entities)
        for (const Mention& m : e.mentions)
          if (m.sentence_index == static_cast<int>(s)) in_sentence.push_back(m);
      for (int t : extract_mdp(doc.sentences[s], in_sentence)) {
        NodeDescriptor d;
        d.kind = NodeKind::Mdp;
        d.sentence = static_cast<int>(s);
        d.token = t;
        plan.nodes.push_back(d);
      }
    }
  } else {
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      for (std::size_t t = 0; t < doc.sentences[s].tokens.size(); ++t) {
        NodeDescriptor d;
        d.kind = NodeKind::Mdp;
        d.sentence = static_cast<int>(s);
        d.token = static_cast<int>(t);
        plan.nodes.push_back(d);
      }
    }
  }
  return plan;
}

}  // namespace lsr
