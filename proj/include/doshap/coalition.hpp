#ifndef DOSHAP_COALITION_HPP
#define DOSHAP_COALITION_HPP

#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>

namespace doshap {

// A subset of players 0..d-1 with bit-set semantics. The target node Y is
// never a member. Capacity is one machine word (64 players).
class Coalition {
 public:
  static constexpr int kMaxPlayers = 64;

  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t bits) : bits_(bits) {}

  constexpr Coalition(std::initializer_list<int> members) {
    for (int m : members) bits_ |= bit(m);
  }

  static constexpr Coalition full(int d) {
    return Coalition(d >= kMaxPlayers ? ~std::uint64_t{0}
                                      : (std::uint64_t{1} << d) - 1);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }

  constexpr bool contains(int player) const { return (bits_ & bit(player)) != 0; }
  constexpr bool subset_of(Coalition other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr Coalition with(int player) const { return Coalition(bits_ | bit(player)); }
  constexpr Coalition without(int player) const { return Coalition(bits_ & ~bit(player)); }

  constexpr Coalition operator|(Coalition o) const { return Coalition(bits_ | o.bits_); }
  constexpr Coalition operator&(Coalition o) const { return Coalition(bits_ & o.bits_); }
  // Set difference.
  constexpr Coalition operator-(Coalition o) const { return Coalition(bits_ & ~o.bits_); }

  constexpr bool operator==(const Coalition&) const = default;

  // Lowest-index member; undefined on the empty set.
  constexpr int lowest() const { return std::countr_zero(bits_); }

  // Visits members in ascending index order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
      fn(std::countr_zero(rest));
    }
  }

 private:
  static constexpr std::uint64_t bit(int player) { return std::uint64_t{1} << player; }

  std::uint64_t bits_ = 0;
};

struct CoalitionHash {
  std::size_t operator()(Coalition c) const noexcept {
    std::uint64_t x = c.bits();
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

}  // namespace doshap

#endif
