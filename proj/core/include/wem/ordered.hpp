#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "wem/memsim.hpp"
#include "wem/rng.hpp"

namespace wem {

namespace detail {
class Joiner;
}

enum class Scheme { Avl, RedBlack, Treap };

// Arena of 16-byte tree nodes (key, left, right, balance field) living in
// simulated memory. All mutation of node fields is funneled through join:
// setters outside an active join scope fault. Writes that would store the
// value already present are skipped, which is what keeps treap updates at
// O(1) writes.
class TreePool {
 public:
  static constexpr uint32_t kNil = 0xFFFFFFFFu;

  TreePool(MemSim& sim, Scheme scheme, uint64_t max_nodes, uint64_t seed);

  Scheme scheme() const { return scheme_; }

  // Tracked field reads.
  uint32_t key(uint32_t n) { return field(n, 0); }
  uint32_t left(uint32_t n) { return field(n, 1); }
  uint32_t right(uint32_t n) { return field(n, 2); }
  uint32_t bal(uint32_t n) { return field(n, 3); }

  // Untracked views for invariant audits and result extraction.
  uint32_t peek_key(uint32_t n) const { return slots_.peek(4 * uint64_t{n}); }
  uint32_t peek_left(uint32_t n) const { return slots_.peek(4 * uint64_t{n} + 1); }
  uint32_t peek_right(uint32_t n) const { return slots_.peek(4 * uint64_t{n} + 2); }
  uint32_t peek_bal(uint32_t n) const { return slots_.peek(4 * uint64_t{n} + 3); }

  uint64_t nodes_allocated() const { return next_node_; }
  uint64_t node_field_writes() const { return writes_; }
  uint64_t node_field_reads() const { return reads_; }
  uint64_t rotation_count() const { return rotations_; }

  uint32_t treap_priority(uint32_t key) const {
    return static_cast<uint32_t>(mix64(seed_ ^ key) >> 32);
  }

  // Only valid inside a join; used by the join implementations and by
  // tests probing the write guard.
  void set_left(uint32_t n, uint32_t v) { set_field(n, 1, v); }
  void set_right(uint32_t n, uint32_t v) { set_field(n, 2, v); }
  void set_bal(uint32_t n, uint32_t v) { set_field(n, 3, v); }
  uint32_t make_node(uint32_t key);

  class JoinScope {
   public:
    explicit JoinScope(TreePool& p) : p_(p) { p_.join_depth_++; }
    ~JoinScope() { p_.join_depth_--; }

   private:
    TreePool& p_;
  };

 private:
  uint32_t field(uint32_t n, uint32_t f) {
    reads_++;
    return slots_.get(4 * uint64_t{n} + f);
  }
  void set_field(uint32_t n, uint32_t f, uint32_t v);
  friend class JoinScope;

  MemSim* sim_;
  Scheme scheme_;
  TypedArray<uint32_t> slots_;
  uint64_t max_nodes_;
  uint64_t next_node_ = 0;
  uint64_t writes_ = 0, reads_ = 0, rotations_ = 0;
  int join_depth_ = 0;
  uint64_t seed_;

  friend class detail::Joiner;
};

struct BalancedTree {
  TreePool* pool = nullptr;
  uint32_t root = TreePool::kNil;

  bool empty() const { return root == TreePool::kNil; }
};

struct SplitResult {
  BalancedTree left;
  bool found = false;
  BalancedTree right;
};

// keys(l) < key < keys(r). Allocates the middle node; all rebalancing
// happens here.
BalancedTree tree_join(BalancedTree l, uint32_t key, BalancedTree r);

SplitResult tree_split(BalancedTree t, uint32_t key);
BalancedTree tree_union(BalancedTree a, BalancedTree b);
BalancedTree tree_difference(BalancedTree a, BalancedTree b);
BalancedTree tree_insert(BalancedTree t, uint32_t key);
BalancedTree tree_delete(BalancedTree t, uint32_t key);

bool tree_contains(BalancedTree t, uint32_t key);  // tracked search
void tree_inorder(BalancedTree t, const std::function<void(uint32_t)>& fn);

// Mean node depth with the root at depth 1; empty tree reports nothing.
std::optional<double> tree_avg_depth(BalancedTree t);
uint64_t tree_size(BalancedTree t);      // untracked
uint32_t tree_height(BalancedTree t);    // untracked

}  // namespace wem
