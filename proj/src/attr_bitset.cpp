#include "tensprov/attr_bitset.hpp"

#include <algorithm>
#include <bit>

#include "tensprov/error.hpp"

namespace tensprov {

std::string_view to_string(BitsetSemantics s) {
  switch (s) {
    case BitsetSemantics::VerticalReduction: return "vertical-reduction";
    case BitsetSemantics::VerticalAugmentation: return "vertical-augmentation";
    case BitsetSemantics::JoinSide: return "join-side";
    case BitsetSemantics::AppendSide: return "append-side";
  }
  return "unknown";
}

BitsetSemantics parse_bitset_semantics(std::string_view name) {
  if (name == "vertical-reduction") return BitsetSemantics::VerticalReduction;
  if (name == "vertical-augmentation") return BitsetSemantics::VerticalAugmentation;
  if (name == "join-side") return BitsetSemantics::JoinSide;
  if (name == "append-side") return BitsetSemantics::AppendSide;
  throw Error(ErrorKind::Parse, "unknown bitset semantics '" + std::string(name) + "'");
}

AttrBitset::AttrBitset(BitsetSemantics semantics, std::size_t length)
    : semantics_(semantics), size_(length), words_((length + 63) / 64, 0) {}

AttrBitset AttrBitset::parse(BitsetSemantics semantics, std::string_view bits) {
  AttrBitset b(semantics, bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      b.set(i);
    } else if (bits[i] != '0') {
      throw Error(ErrorKind::Parse, "bitset '" + std::string(bits) + "' has a non-binary digit");
    }
  }
  return b;
}

AttrBitset AttrBitset::vertical_augmentation(std::string_view bits, std::size_t input_attrs) {
  AttrBitset b = parse(BitsetSemantics::VerticalAugmentation, bits);
  if (input_attrs >= b.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "vertical augmentation bitset needs more positions than input attributes");
  }
  b.input_attrs_ = input_attrs;
  return b;
}

bool AttrBitset::test(std::size_t pos) const {
  if (pos >= size_) {
    throw Error(ErrorKind::OutOfRange, "attribute position " + std::to_string(pos) +
                                           " out of range for bitset of length " + std::to_string(size_));
  }
  return (words_[pos / 64] >> (pos % 64)) & 1u;
}

void AttrBitset::set(std::size_t pos, bool value) {
  if (pos >= size_) {
    throw Error(ErrorKind::OutOfRange, "attribute position " + std::to_string(pos) + " out of range");
  }
  const std::uint64_t mask = std::uint64_t{1} << (pos % 64);
  if (value) {
    words_[pos / 64] |= mask;
  } else {
    words_[pos / 64] &= ~mask;
  }
}

std::size_t AttrBitset::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t AttrBitset::rank(std::size_t pos) const {
  if (pos >= size_) throw Error(ErrorKind::OutOfRange, "rank position out of range");
  std::size_t c = 0;
  const std::size_t word = pos / 64;
  for (std::size_t w = 0; w < word; ++w) c += static_cast<std::size_t>(std::popcount(words_[w]));
  const unsigned shift = static_cast<unsigned>(pos % 64);
  const std::uint64_t mask = shift == 63 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (shift + 1)) - 1);
  return c + static_cast<std::size_t>(std::popcount(words_[word] & mask));
}

std::optional<std::size_t> AttrBitset::select(std::size_t k) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    const auto pc = static_cast<std::size_t>(std::popcount(word));
    if (k >= pc) {
      k -= pc;
      continue;
    }
    for (std::size_t j = 0; j < k; ++j) word &= word - 1;  // clear lowest set bits
    return w * 64 + static_cast<std::size_t>(std::countr_zero(word));
  }
  return std::nullopt;
}

std::string AttrBitset::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

std::optional<std::size_t> map_f_vr(const AttrBitset& b, std::size_t i) {
  if (!b.test(i)) return std::nullopt;
  return b.rank(i) - 1;
}

std::size_t map_b_vr(const AttrBitset& b, std::size_t i) {
  auto j = b.select(i);
  if (!j) {
    throw Error(ErrorKind::OutOfRange, "output attribute " + std::to_string(i) + " exceeds the " +
                                           std::to_string(b.count()) + " kept attributes");
  }
  return *j;
}

std::vector<std::size_t> map_b_va(const AttrBitset& b, std::size_t m, std::size_t i) {
  if (m >= b.size()) {
    throw Error(ErrorKind::InvalidArgument, "vertical augmentation: m must be below the bitset length");
  }
  if (i >= b.size()) {
    throw Error(ErrorKind::OutOfRange, "output attribute " + std::to_string(i) + " out of range");
  }
  if (i < m) return {i};
  std::vector<std::size_t> sources;
  for (std::size_t j = 0; j < m; ++j) {
    if (b.test(j)) sources.push_back(j);
  }
  return sources;
}

std::vector<std::size_t> map_b_va(const AttrBitset& b, std::size_t i) {
  if (!b.input_attr_count()) {
    throw Error(ErrorKind::InvalidArgument, "vertical augmentation bitset lacks its input attribute count");
  }
  return map_b_va(b, *b.input_attr_count(), i);
}

std::size_t map_f_va(const AttrBitset& b, std::size_t i) {
  const std::size_t m = b.input_attr_count().value_or(b.size());
  if (i >= m) throw Error(ErrorKind::OutOfRange, "input attribute " + std::to_string(i) + " out of range");
  return i;
}

std::size_t map_f_join(const AttrBitset& b, std::size_t i) {
  auto j = b.select(i);
  if (!j) {
    throw Error(ErrorKind::OutOfRange, "input attribute " + std::to_string(i) + " exceeds the " +
                                           std::to_string(b.count()) + " mapped attributes");
  }
  return *j;
}

std::optional<std::size_t> map_b_join(const AttrBitset& b, std::size_t i) {
  if (!b.test(i)) return std::nullopt;
  return b.rank(i) - 1;
}

AttrMapping AttrMapping::kept_order(std::size_t input_attrs, std::vector<std::size_t> kept) {
  AttrBitset bits(BitsetSemantics::VerticalReduction, input_attrs);
  for (auto k : kept) {
    if (bits.test(k)) throw Error(ErrorKind::InvalidArgument, "kept list repeats a position");
    bits.set(k);
  }
  if (std::is_sorted(kept.begin(), kept.end())) return plain(std::move(bits));
  return {std::move(bits), std::move(kept)};
}

std::vector<std::size_t> AttrMapping::forward(std::size_t i) const {
  switch (bits.semantics()) {
    case BitsetSemantics::VerticalReduction: {
      if (!bits.test(i)) return {};
      if (order) {
        auto it = std::find(order->begin(), order->end(), i);
        return {static_cast<std::size_t>(it - order->begin())};
      }
      return {*map_f_vr(bits, i)};
    }
    case BitsetSemantics::VerticalAugmentation:
      return {map_f_va(bits, i)};
    case BitsetSemantics::JoinSide:
    case BitsetSemantics::AppendSide: {
      if (order) {
        auto it = std::find(order->begin(), order->end(), i);
        if (it == order->end()) return {};
        return {*bits.select(static_cast<std::size_t>(it - order->begin()))};
      }
      if (i >= bits.count()) return {};
      return {map_f_join(bits, i)};
    }
  }
  return {};
}

std::vector<std::size_t> AttrMapping::backward(std::size_t i) const {
  switch (bits.semantics()) {
    case BitsetSemantics::VerticalReduction: {
      if (order) {
        if (i >= order->size()) throw Error(ErrorKind::OutOfRange, "output attribute out of range");
        return {(*order)[i]};
      }
      return {map_b_vr(bits, i)};
    }
    case BitsetSemantics::VerticalAugmentation:
      return map_b_va(bits, i);
    case BitsetSemantics::JoinSide:
    case BitsetSemantics::AppendSide: {
      auto r = map_b_join(bits, i);
      if (!r) return {};
      return {order ? (*order)[*r] : *r};
    }
  }
  return {};
}

}  // namespace tensprov
