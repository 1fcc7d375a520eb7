// Slice elements and sets. An element is either a concrete instruction
// number or the symbolic parameter of a formal/global in some procedure's
// frame. Sets are bit vectors over a per-analysis universe.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symslice/ir.hpp"

namespace symslice {

struct ValueKey {
  std::string func; // owning frame ('@'-prefixed function name)
  std::string name; // value name; globals keep their '@' sigil

  auto operator<=>(const ValueKey&) const = default;
};

struct SliceElem {
  bool symbolic = false;
  InstrId id = 0;  // concrete
  ValueKey sym;    // symbolic parameter l_x

  static SliceElem concrete(InstrId i) { return SliceElem{false, i, {}}; }
  static SliceElem parameter(ValueKey k) { return SliceElem{true, 0, std::move(k)}; }
  auto operator<=>(const SliceElem&) const = default;
};

// Fixed element universe of one analysis: instructions 1..n, then the
// symbolic parameters of every procedure frame.
class Universe {
public:
  Universe() = default;
  Universe(std::size_t instr_count, std::vector<ValueKey> symbols);

  std::size_t instr_count() const { return n_; }
  std::size_t size() const { return n_ + symbols_.size(); }
  const std::vector<ValueKey>& symbols() const { return symbols_; }

  std::size_t bit_of(InstrId id) const { return id - 1; }
  std::size_t bit_of(const ValueKey& sym) const { return n_ + sym_index_.at(sym); }
  bool has_symbol(const ValueKey& sym) const { return sym_index_.count(sym) > 0; }
  SliceElem elem_at(std::size_t bit) const;

private:
  std::size_t n_ = 0;
  std::vector<ValueKey> symbols_;
  std::map<ValueKey, std::size_t> sym_index_;
};

class SliceSet {
public:
  SliceSet() = default;
  explicit SliceSet(std::size_t universe_bits) : bits_((universe_bits + 63) / 64, 0) {}

  void insert(std::size_t bit) { word(bit) |= mask(bit); }
  bool contains(std::size_t bit) const {
    std::size_t w = bit / 64;
    return w < bits_.size() && (bits_[w] & mask(bit));
  }
  void erase(std::size_t bit) {
    std::size_t w = bit / 64;
    if (w < bits_.size()) bits_[w] &= ~mask(bit);
  }

  SliceSet& operator|=(const SliceSet& o);
  SliceSet& operator&=(const SliceSet& o);
  bool operator==(const SliceSet& o) const;
  bool empty() const;
  std::size_t count() const;
  bool is_subset_of(const SliceSet& o) const;

  // keep only bits below `limit` (used to drop all symbolic elements)
  void truncate(std::size_t limit);
  // drop symbol bits not present in `keep` (bits >= n_instrs)
  void mask_symbols(std::size_t n_instrs, const SliceSet& keep);

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t v = bits_[w];
      while (v) {
        unsigned tz = static_cast<unsigned>(__builtin_ctzll(v));
        fn(w * 64 + tz);
        v &= v - 1;
      }
    }
  }

private:
  std::uint64_t& word(std::size_t bit) {
    std::size_t w = bit / 64;
    if (w >= bits_.size()) bits_.resize(w + 1, 0);
    return bits_[w];
  }
  static std::uint64_t mask(std::size_t bit) { return 1ull << (bit % 64); }
  std::vector<std::uint64_t> bits_;
};

// Rendering helpers shared by reports and tests.
std::vector<SliceElem> elements(const Universe& u, const SliceSet& s);
std::vector<InstrId> concrete_ids(const Universe& u, const SliceSet& s);
std::string to_string(const Universe& u, const SliceSet& s);
std::string sym_name(const ValueKey& k); // "l_%a" style display

} // namespace symslice
