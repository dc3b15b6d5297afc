#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lsr/tensor.hpp"

namespace lsr {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tokens plus per-token dependency head. Heads are 1-based with 0 marking
/// the root token; the relation must form a single tree.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<int> dep_head;
};

struct Mention {
  int entity_id = 0;
  int sentence_index = 0;
  int start = 0;  // token span [start, end)
  int end = 0;
};

struct Entity {
  int id = 0;
  std::vector<Mention> mentions;
};

/// Directed relational fact (head, tail, relation id).
struct RelationFact {
  int head = 0;
  int tail = 0;
  int relation = 0;

  bool operator<(const RelationFact& o) const {
    if (head != o.head) return head < o.head;
    if (tail != o.tail) return tail < o.tail;
    return relation < o.relation;
  }
  bool operator==(const RelationFact& o) const {
    return head == o.head && tail == o.tail && relation == o.relation;
  }
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
  std::vector<Entity> entities;
  std::vector<RelationFact> facts;

  const Entity& entity(int id) const;
};

using Corpus = std::vector<Document>;

enum class NodeKind { Mention, Entity, Mdp };

enum class GraphMode { WithMdp, FullyConnectedTokens };

struct NodeDescriptor {
  NodeKind kind = NodeKind::Mention;
  int mention_index = -1;  // flat index into mention order (Mention nodes)
  int entity_id = -1;      // Entity nodes
  int sentence = -1;       // Mdp / token nodes
  int token = -1;
};

/// Deterministic node ordering: mentions in document order, then entities by
/// id, then MDP (or all-token) descriptors by (sentence, token).
struct NodePlan {
  std::vector<NodeDescriptor> nodes;
  // Mentions in document order; mention_index in descriptors points here.
  std::vector<Mention> mention_order;
  int n() const { return static_cast<int>(nodes.size()); }
};

/// Throws DataError naming the violated rule if any document invariant
/// fails (span ranges, head tree shape, fact references, ...).
void validate(const Document& doc);

/// Reads a line-oriented JSON corpus (one document object per line).
Corpus load_corpus(const std::string& path);

void save_corpus(const Corpus& corpus, const std::string& path);

/// Unique path between tokens a and b (inclusive) in the undirected
/// dependency tree. Token indices are 0-based.
std::vector<int> shortest_dep_path(const Sentence& sentence, int a, int b);

/// Anchor token of a mention: the first span token whose head lies outside
/// the span (the span's syntactic head).
int mention_anchor(const Sentence& sentence, const Mention& mention);

/// Union of shortest dependency paths between anchor tokens of all mention
/// pairs, minus tokens covered by any mention span; sorted ascending.
std::vector<int> extract_mdp(const Sentence& sentence,
                             const std::vector<Mention>& mentions);

NodePlan build_node_plan(const Document& doc, GraphMode mode);

}  // namespace lsr
