#include "symslice/slice_set.hpp"

#include <algorithm>
#include <sstream>

namespace symslice {

Universe::Universe(std::size_t instr_count, std::vector<ValueKey> symbols)
    : n_(instr_count), symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) sym_index_[symbols_[i]] = i;
}

SliceElem Universe::elem_at(std::size_t bit) const {
  if (bit < n_) return SliceElem::concrete(static_cast<InstrId>(bit + 1));
  return SliceElem::parameter(symbols_.at(bit - n_));
}

SliceSet& SliceSet::operator|=(const SliceSet& o) {
  if (o.bits_.size() > bits_.size()) bits_.resize(o.bits_.size(), 0);
  for (std::size_t i = 0; i < o.bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

SliceSet& SliceSet::operator&=(const SliceSet& o) {
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= i < o.bits_.size() ? o.bits_[i] : 0;
  return *this;
}

bool SliceSet::operator==(const SliceSet& o) const {
  std::size_t n = std::max(bits_.size(), o.bits_.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t a = i < bits_.size() ? bits_[i] : 0;
    std::uint64_t b = i < o.bits_.size() ? o.bits_[i] : 0;
    if (a != b) return false;
  }
  return true;
}

bool SliceSet::empty() const {
  for (auto w : bits_)
    if (w) return false;
  return true;
}

std::size_t SliceSet::count() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

bool SliceSet::is_subset_of(const SliceSet& o) const {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    std::uint64_t other = i < o.bits_.size() ? o.bits_[i] : 0;
    if (bits_[i] & ~other) return false;
  }
  return true;
}

void SliceSet::truncate(std::size_t limit) {
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::size_t lo = w * 64;
    if (lo >= limit) {
      bits_[w] = 0;
    } else if (lo + 64 > limit) {
      bits_[w] &= (1ull << (limit - lo)) - 1;
    }
  }
}

void SliceSet::mask_symbols(std::size_t n_instrs, const SliceSet& keep) {
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::size_t lo = w * 64;
    std::uint64_t keep_word = w < keep.bits_.size() ? keep.bits_[w] : 0;
    if (lo >= n_instrs) {
      bits_[w] &= keep_word;
    } else if (lo + 64 > n_instrs) {
      std::uint64_t low_mask = (1ull << (n_instrs - lo)) - 1;
      bits_[w] = (bits_[w] & low_mask) | (bits_[w] & ~low_mask & keep_word);
    }
  }
}

std::vector<SliceElem> elements(const Universe& u, const SliceSet& s) {
  std::vector<SliceElem> out;
  s.for_each([&](std::size_t bit) { out.push_back(u.elem_at(bit)); });
  return out;
}

std::vector<InstrId> concrete_ids(const Universe& u, const SliceSet& s) {
  std::vector<InstrId> out;
  s.for_each([&](std::size_t bit) {
    if (bit < u.instr_count()) out.push_back(static_cast<InstrId>(bit + 1));
  });
  return out;
}

std::string sym_name(const ValueKey& k) { return "l_" + k.name; }

std::string to_string(const Universe& u, const SliceSet& s) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  s.for_each([&](std::size_t bit) {
    if (!first) os << ",";
    first = false;
    SliceElem e = u.elem_at(bit);
    if (e.symbolic)
      os << sym_name(e.sym);
    else
      os << e.id;
  });
  os << "}";
  return os.str();
}

} // namespace symslice
