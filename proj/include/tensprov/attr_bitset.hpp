#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tensprov {

enum class BitsetSemantics { VerticalReduction, VerticalAugmentation, JoinSide, AppendSide };

std::string_view to_string(BitsetSemantics s);
BitsetSemantics parse_bitset_semantics(std::string_view name);

// Positional bit string over a schema. Position 0 is rendered first, so the
// string "10011" has bits 0, 3 and 4 set.
class AttrBitset {
 public:
  AttrBitset() = default;
  AttrBitset(BitsetSemantics semantics, std::size_t length);
  static AttrBitset parse(BitsetSemantics semantics, std::string_view bits);
  // Vertical augmentation: `input_attrs` is m, the count of
  // attributes carried over unchanged; it must be below the length.
  static AttrBitset vertical_augmentation(std::string_view bits, std::size_t input_attrs);

  BitsetSemantics semantics() const { return semantics_; }
  std::size_t size() const { return size_; }
  std::optional<std::size_t> input_attr_count() const { return input_attrs_; }

  bool test(std::size_t pos) const;
  void set(std::size_t pos, bool value = true);

  std::size_t count() const;
  // Set bits in [0, pos] (inclusive prefix popcount).
  std::size_t rank(std::size_t pos) const;
  // Position of the (k+1)-th set bit, if any.
  std::optional<std::size_t> select(std::size_t k) const;

  std::string to_string() const;

  friend bool operator==(const AttrBitset&, const AttrBitset&) = default;

 private:
  BitsetSemantics semantics_ = BitsetSemantics::VerticalReduction;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
  std::optional<std::size_t> input_attrs_;
};

// Vertical reduction, forward: input position -> output position, or nullopt
// when the attribute was dropped.
std::optional<std::size_t> map_f_vr(const AttrBitset& b, std::size_t i);
// Vertical reduction, backward: output position -> input position.
std::size_t map_b_vr(const AttrBitset& b, std::size_t i);

// Vertical augmentation, backward: identity below m, otherwise the set bits
// below m (the attributes the new columns were derived from).
std::vector<std::size_t> map_b_va(const AttrBitset& b, std::size_t m, std::size_t i);
std::vector<std::size_t> map_b_va(const AttrBitset& b, std::size_t i);
// Vertical augmentation, forward: identity on the carried-over attributes.
std::size_t map_f_va(const AttrBitset& b, std::size_t i);

// Join (and append) side, forward: input position -> output position.
std::size_t map_f_join(const AttrBitset& b, std::size_t i);
// Join side, backward: output position -> input position, or nullopt when the
// output attribute does not come from this side.
std::optional<std::size_t> map_b_join(const AttrBitset& b, std::size_t i);

inline std::size_t identity_attr_map(std::size_t i) { return i; }

// Bitset plus an optional explicit order for annotations whose kept attributes
// do not appear in input order. order[k] is the input position of the
// attribute behind the k-th set bit (vertical reduction: the k-th output
// attribute; join side: the k-th output position claimed by this side).
struct AttrMapping {
  AttrBitset bits;
  std::optional<std::vector<std::size_t>> order;

  static AttrMapping plain(AttrBitset bits) { return {std::move(bits), std::nullopt}; }
  // Vertical reduction from an explicit list of kept input positions, in
  // output order. Uses the plain bitset when the list is increasing.
  static AttrMapping kept_order(std::size_t input_attrs, std::vector<std::size_t> kept);

  // Input position -> output positions (empty when dropped / not mapped).
  std::vector<std::size_t> forward(std::size_t i) const;
  // Output position -> input positions (empty when not originating here).
  std::vector<std::size_t> backward(std::size_t i) const;

  friend bool operator==(const AttrMapping&, const AttrMapping&) = default;
};

}  // namespace tensprov
