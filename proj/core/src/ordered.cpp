#include "wem/ordered.hpp"

#include <algorithm>
#include <vector>

namespace wem {

TreePool::TreePool(MemSim& sim, Scheme scheme, uint64_t max_nodes, uint64_t seed)
    : sim_(&sim),
      scheme_(scheme),
      slots_(sim, 4 * max_nodes),
      max_nodes_(max_nodes),
      seed_(mix64(seed ^ 0x71c9a3b5d6e8f02dull)) {}

void TreePool::set_field(uint32_t n, uint32_t f, uint32_t v) {
  if (join_depth_ == 0) throw SimFault("node field write outside join");
  uint64_t idx = 4 * uint64_t{n} + f;
  reads_++;
  if (slots_.get(idx) == v) return;  // unchanged fields cost no write
  writes_++;
  slots_.set(idx, v);
}

uint32_t TreePool::make_node(uint32_t key) {
  if (join_depth_ == 0) throw SimFault("node allocation outside join");
  if (next_node_ >= max_nodes_) throw SimFault("tree pool exhausted");
  uint32_t n = static_cast<uint32_t>(next_node_++);
  uint64_t base = 4 * uint64_t{n};
  writes_ += 4;
  slots_.set(base + 0, key);
  slots_.set(base + 1, kNil);
  slots_.set(base + 2, kNil);
  uint32_t b = 0;
  switch (scheme_) {
    case Scheme::Avl: b = 1; break;                      // height
    case Scheme::RedBlack: b = 1; break;                 // red
    case Scheme::Treap: b = treap_priority(key); break;  // fixed priority
  }
  slots_.set(base + 3, b);
  return n;
}

namespace detail {

constexpr uint32_t kNil = TreePool::kNil;

// The per-scheme join algorithms. join_node links an existing node between
// two trees and restores the balancing invariant; it is the only place node
// fields change.
class Joiner {
 public:
  explicit Joiner(TreePool& p) : p_(p) {}

  uint32_t join_node(uint32_t l, uint32_t n, uint32_t r) {
    TreePool::JoinScope scope(p_);
    switch (p_.scheme()) {
      case Scheme::Avl: return join_avl(l, n, r);
      case Scheme::RedBlack: return join_rb(l, n, r);
      case Scheme::Treap: return join_treap(l, n, r);
    }
    return kNil;
  }

  uint32_t join_new(uint32_t l, uint32_t key, uint32_t r) {
    uint32_t n;
    {
      TreePool::JoinScope scope(p_);
      n = p_.make_node(key);
    }
    return join_node(l, n, r);
  }

 private:
  // ---- AVL: balance field stores subtree height ----
  uint32_t height(uint32_t t) { return t == kNil ? 0 : p_.bal(t); }

  void fix_height(uint32_t t) {
    p_.set_bal(t, 1 + std::max(height(p_.left(t)), height(p_.right(t))));
  }

  uint32_t rotate_left(uint32_t t) {
    p_.rotations_++;
    uint32_t r = p_.right(t);
    p_.set_right(t, p_.left(r));
    p_.set_left(r, t);
    if (p_.scheme() == Scheme::Avl) {
      fix_height(t);
      fix_height(r);
    }
    return r;
  }

  uint32_t rotate_right(uint32_t t) {
    p_.rotations_++;
    uint32_t l = p_.left(t);
    p_.set_left(t, p_.right(l));
    p_.set_right(l, t);
    if (p_.scheme() == Scheme::Avl) {
      fix_height(t);
      fix_height(l);
    }
    return l;
  }

  uint32_t avl_node(uint32_t l, uint32_t n, uint32_t r) {
    p_.set_left(n, l);
    p_.set_right(n, r);
    fix_height(n);
    return n;
  }

  uint32_t join_right_avl(uint32_t t, uint32_t n, uint32_t r, uint32_t hr) {
    uint32_t c = p_.right(t);
    if (height(c) <= hr + 1) {
      uint32_t m = avl_node(c, n, r);
      p_.set_right(t, m);
      if (p_.bal(m) <= height(p_.left(t)) + 1) {
        fix_height(t);
        return t;
      }
      p_.set_right(t, rotate_right(m));
      return rotate_left(t);
    }
    uint32_t m = join_right_avl(c, n, r, hr);
    p_.set_right(t, m);
    if (p_.bal(m) <= height(p_.left(t)) + 1) {
      fix_height(t);
      return t;
    }
    return rotate_left(t);
  }

  uint32_t join_left_avl(uint32_t l, uint32_t n, uint32_t t, uint32_t hl) {
    uint32_t c = p_.left(t);
    if (height(c) <= hl + 1) {
      uint32_t m = avl_node(l, n, c);
      p_.set_left(t, m);
      if (p_.bal(m) <= height(p_.right(t)) + 1) {
        fix_height(t);
        return t;
      }
      p_.set_left(t, rotate_left(m));
      return rotate_right(t);
    }
    uint32_t m = join_left_avl(l, n, c, hl);
    p_.set_left(t, m);
    if (p_.bal(m) <= height(p_.right(t)) + 1) {
      fix_height(t);
      return t;
    }
    return rotate_right(t);
  }

  uint32_t join_avl(uint32_t l, uint32_t n, uint32_t r) {
    uint32_t hl = height(l), hr = height(r);
    if (hl > hr + 1) return join_right_avl(l, n, r, hr);
    if (hr > hl + 1) return join_left_avl(l, n, r, hl);
    return avl_node(l, n, r);
  }

  // ---- Red-black: balance field stores the color (0 black, 1 red).
  // Black heights are recomputed by spine walks, so only rotation and
  // recoloring sites pay writes.
  bool is_black(uint32_t t) { return t == kNil || p_.bal(t) == 0; }
  bool is_red(uint32_t t) { return t != kNil && p_.bal(t) != 0; }

  uint32_t black_height(uint32_t t) {
    uint32_t h = 0;
    while (t != kNil) {
      if (p_.bal(t) == 0) h++;
      t = p_.left(t);
    }
    return h;
  }

  uint32_t rb_node(uint32_t l, uint32_t n, uint32_t r, uint32_t color) {
    p_.set_left(n, l);
    p_.set_right(n, r);
    p_.set_bal(n, color);
    return n;
  }

  uint32_t join_right_rb(uint32_t t, uint32_t n, uint32_t r, uint32_t bht,
                         uint32_t bhr) {
    if (bht == bhr && is_black(t)) return rb_node(t, n, r, 1);
    uint32_t m =
        join_right_rb(p_.right(t), n, r, bht - (p_.bal(t) == 0 ? 1 : 0), bhr);
    p_.set_right(t, m);
    if (is_black(t) && is_red(m) && is_red(p_.right(m))) {
      p_.set_bal(p_.right(m), 0);
      return rotate_left(t);
    }
    return t;
  }

  uint32_t join_left_rb(uint32_t l, uint32_t n, uint32_t t, uint32_t bhl,
                        uint32_t bht) {
    if (bht == bhl && is_black(t)) return rb_node(l, n, t, 1);
    uint32_t m =
        join_left_rb(l, n, p_.left(t), bhl, bht - (p_.bal(t) == 0 ? 1 : 0));
    p_.set_left(t, m);
    if (is_black(t) && is_red(m) && is_red(p_.left(m))) {
      p_.set_bal(p_.left(m), 0);
      return rotate_right(t);
    }
    return t;
  }

  uint32_t join_rb(uint32_t l, uint32_t n, uint32_t r) {
    uint32_t bhl = black_height(l), bhr = black_height(r);
    if (bhl > bhr) {
      uint32_t t = join_right_rb(l, n, r, bhl, bhr);
      if (is_red(t) && is_red(p_.right(t))) p_.set_bal(t, 0);
      return t;
    }
    if (bhr > bhl) {
      uint32_t t = join_left_rb(l, n, r, bhl, bhr);
      if (is_red(t) && is_red(p_.left(t))) p_.set_bal(t, 0);
      return t;
    }
    return rb_node(l, n, r, is_black(l) && is_black(r) ? 1 : 0);
  }

  // ---- Treap: balance field stores a fixed priority; ties break by key
  // so the shape is a pure function of the key set.
  bool beats(uint32_t pa, uint32_t ka, uint32_t pb, uint32_t kb) {
    return pa != pb ? pa > pb : ka > kb;
  }

  uint32_t join_treap(uint32_t l, uint32_t n, uint32_t r) {
    uint32_t pn = p_.bal(n), kn = p_.key(n);
    bool l_wins = l != kNil && beats(p_.bal(l), p_.key(l), pn, kn);
    bool r_wins = r != kNil && beats(p_.bal(r), p_.key(r), pn, kn);
    if (l_wins && (r == kNil || beats(p_.bal(l), p_.key(l), p_.bal(r), p_.key(r)))) {
      p_.set_right(l, join_treap(p_.right(l), n, r));
      return l;
    }
    if (r_wins) {
      p_.set_left(r, join_treap(l, n, p_.left(r)));
      return r;
    }
    p_.set_left(n, l);
    p_.set_right(n, r);
    return n;
  }

  TreePool& p_;
};

struct RawSplit {
  uint32_t left;
  bool found;
  uint32_t right;
};

RawSplit split_rec(TreePool& p, uint32_t t, uint32_t key) {
  if (t == kNil) return {kNil, false, kNil};
  uint32_t tk = p.key(t);
  Joiner j(p);
  if (key < tk) {
    RawSplit s = split_rec(p, p.left(t), key);
    return {s.left, s.found, j.join_node(s.right, t, p.right(t))};
  }
  if (key > tk) {
    RawSplit s = split_rec(p, p.right(t), key);
    return {j.join_node(p.left(t), t, s.left), s.found, s.right};
  }
  return {p.left(t), true, p.right(t)};
}

uint32_t union_rec(TreePool& p, uint32_t t1, uint32_t t2) {
  if (t1 == kNil) return t2;
  if (t2 == kNil) return t1;
  RawSplit s = split_rec(p, t2, p.key(t1));
  uint32_t l = union_rec(p, p.left(t1), s.left);
  uint32_t r = union_rec(p, p.right(t1), s.right);
  return Joiner(p).join_node(l, t1, r);
}

// Removes and returns the maximum node of t.
struct LastSplit {
  uint32_t rest;
  uint32_t last;
};

LastSplit split_last(TreePool& p, uint32_t t) {
  uint32_t r = p.right(t);
  if (r == kNil) return {p.left(t), t};
  LastSplit s = split_last(p, r);
  return {Joiner(p).join_node(p.left(t), t, s.rest), s.last};
}

uint32_t join2(TreePool& p, uint32_t l, uint32_t r) {
  if (l == kNil) return r;
  LastSplit s = split_last(p, l);
  return Joiner(p).join_node(s.rest, s.last, r);
}

uint32_t difference_rec(TreePool& p, uint32_t t1, uint32_t t2) {
  if (t1 == kNil) return kNil;
  if (t2 == kNil) return t1;
  RawSplit s = split_rec(p, t1, p.key(t2));
  uint32_t l = difference_rec(p, s.left, p.left(t2));
  uint32_t r = difference_rec(p, s.right, p.right(t2));
  return join2(p, l, r);
}

}  // namespace detail

BalancedTree tree_join(BalancedTree l, uint32_t key, BalancedTree r) {
  TreePool* p = l.pool ? l.pool : r.pool;
  if (!p) throw SimFault("tree has no backing pool");
  return {p, detail::Joiner(*p).join_new(l.root, key, r.root)};
}

SplitResult tree_split(BalancedTree t, uint32_t key) {
  if (t.empty()) return {{t.pool, TreePool::kNil}, false, {t.pool, TreePool::kNil}};
  detail::RawSplit s = detail::split_rec(*t.pool, t.root, key);
  return {{t.pool, s.left}, s.found, {t.pool, s.right}};
}

BalancedTree tree_union(BalancedTree a, BalancedTree b) {
  TreePool* p = a.pool ? a.pool : b.pool;
  if (a.empty()) return b;
  if (b.empty()) return a;
  return {p, detail::union_rec(*p, a.root, b.root)};
}

BalancedTree tree_difference(BalancedTree a, BalancedTree b) {
  if (a.empty() || b.empty()) return a;
  return {a.pool, detail::difference_rec(*a.pool, a.root, b.root)};
}

BalancedTree tree_insert(BalancedTree t, uint32_t key) {
  BalancedTree single = tree_join({t.pool, TreePool::kNil}, key,
                                  {t.pool, TreePool::kNil});
  return tree_union(t, single);
}

BalancedTree tree_delete(BalancedTree t, uint32_t key) {
  if (t.empty()) return t;
  BalancedTree single = tree_join({t.pool, TreePool::kNil}, key,
                                  {t.pool, TreePool::kNil});
  return tree_difference(t, single);
}

bool tree_contains(BalancedTree t, uint32_t key) {
  uint32_t n = t.root;
  while (n != TreePool::kNil) {
    uint32_t k = t.pool->key(n);
    if (key == k) return true;
    n = key < k ? t.pool->left(n) : t.pool->right(n);
  }
  return false;
}

void tree_inorder(BalancedTree t, const std::function<void(uint32_t)>& fn) {
  std::vector<uint32_t> stack;
  uint32_t n = t.root;
  while (n != TreePool::kNil || !stack.empty()) {
    while (n != TreePool::kNil) {
      stack.push_back(n);
      n = t.pool->left(n);
    }
    n = stack.back();
    stack.pop_back();
    fn(t.pool->key(n));
    n = t.pool->right(n);
  }
}

std::optional<double> tree_avg_depth(BalancedTree t) {
  if (t.empty()) return std::nullopt;
  uint64_t total = 0, count = 0;
  std::vector<std::pair<uint32_t, uint32_t>> stack{{t.root, 1}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    total += d;
    count++;
    uint32_t l = t.pool->left(n), r = t.pool->right(n);
    if (l != TreePool::kNil) stack.push_back({l, d + 1});
    if (r != TreePool::kNil) stack.push_back({r, d + 1});
  }
  return static_cast<double>(total) / static_cast<double>(count);
}

uint64_t tree_size(BalancedTree t) {
  if (t.empty()) return 0;
  uint64_t count = 0;
  std::vector<uint32_t> stack{t.root};
  while (!stack.empty()) {
    uint32_t n = stack.back();
    stack.pop_back();
    count++;
    uint32_t l = t.pool->peek_left(n), r = t.pool->peek_right(n);
    if (l != TreePool::kNil) stack.push_back(l);
    if (r != TreePool::kNil) stack.push_back(r);
  }
  return count;
}

uint32_t tree_height(BalancedTree t) {
  if (t.empty()) return 0;
  uint32_t best = 0;
  std::vector<std::pair<uint32_t, uint32_t>> stack{{t.root, 1}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    uint32_t l = t.pool->peek_left(n), r = t.pool->peek_right(n);
    if (l != TreePool::kNil) stack.push_back({l, d + 1});
    if (r != TreePool::kNil) stack.push_back({r, d + 1});
  }
  return best;
}

}  // namespace wem
