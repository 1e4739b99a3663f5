#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace popproto {

/// Colours are 1..palette_size; 0 encodes the empty pointer (parent = ⊥).
using Colour = std::uint32_t;
inline constexpr Colour kNoColour = 0;

/// Dynamic bitset over the colours of a palette.
class ColourSet {
 public:
  ColourSet() = default;
  explicit ColourSet(std::size_t palette_size)
      : palette_(palette_size), words_((palette_size + 63) / 64, 0) {}

  std::size_t palette_size() const noexcept { return palette_; }

  bool contains(Colour c) const noexcept {
    if (c == kNoColour || c > palette_) return false;
    return (words_[(c - 1) >> 6] >> ((c - 1) & 63)) & 1U;
  }
  void insert(Colour c) noexcept {
    if (c == kNoColour || c > palette_) return;
    words_[(c - 1) >> 6] |= std::uint64_t{1} << ((c - 1) & 63);
  }
  void erase(Colour c) noexcept {
    if (c == kNoColour || c > palette_) return;
    words_[(c - 1) >> 6] &= ~(std::uint64_t{1} << ((c - 1) & 63));
  }
  void clear() noexcept {
    for (auto& w : words_) w = 0;
  }
  std::size_t size() const noexcept {
    std::size_t s = 0;
    for (auto w : words_) s += static_cast<std::size_t>(std::popcount(w));
    return s;
  }
  bool empty() const noexcept { return size() == 0; }

  bool operator==(const ColourSet&) const = default;

 private:
  std::size_t palette_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class Stamp : std::uint8_t { Zero = 0, One = 1, Cleared = 2 };

/// stamp(u, ·) ∈ {0, 1, ⊥}^palette, stored as two bitsets.
class StampVector {
 public:
  StampVector() = default;
  explicit StampVector(std::size_t palette_size) : known_(palette_size), bits_(palette_size) {}

  std::size_t palette_size() const noexcept { return known_.palette_size(); }

  Stamp get(Colour c) const noexcept {
    if (!known_.contains(c)) return Stamp::Cleared;
    return bits_.contains(c) ? Stamp::One : Stamp::Zero;
  }
  void set(Colour c, Stamp s) noexcept {
    if (s == Stamp::Cleared) {
      known_.erase(c);
      bits_.erase(c);
      return;
    }
    known_.insert(c);
    if (s == Stamp::One)
      bits_.insert(c);
    else
      bits_.erase(c);
  }
  void set_bit(Colour c, bool bit) noexcept { set(c, bit ? Stamp::One : Stamp::Zero); }
  void clear() noexcept {
    known_.clear();
    bits_.clear();
  }
  /// Number of non-⊥ entries.
  std::size_t known_count() const noexcept { return known_.size(); }

  bool operator==(const StampVector&) const = default;

 private:
  ColourSet known_;
  ColourSet bits_;
};

struct ColouringState {
  Colour colour = 1;
  StampVector stamps;

  bool operator==(const ColouringState&) const = default;
};

struct OrientationState {
  Colour parent = kNoColour;
  ColourSet children;

  bool operator==(const OrientationState&) const = default;
};

struct LeaderState {
  bool has_token = false;

  bool output() const noexcept { return has_token; }
  bool operator==(const LeaderState&) const = default;
};

enum class Token : std::uint8_t { A, B, C };
enum class Opinion : std::uint8_t { A, B };

constexpr Token token_of(Opinion o) noexcept { return o == Opinion::A ? Token::A : Token::B; }

struct MajorityState {
  Token token = Token::C;
  Opinion output = Opinion::A;

  bool operator==(const MajorityState&) const = default;
};

struct TwoColourState {
  bool bit = false;

  bool operator==(const TwoColourState&) const = default;
};

struct CountingState {
  std::uint32_t counter = 1;
  std::uint32_t broadcast_max = 1;

  bool operator==(const CountingState&) const = default;
};

/// All protocol layers' state at one node. Each layer owns exactly one slice;
/// slices of layers absent from a stack stay fixed for the whole run (this is
/// how pre-coloured or pre-oriented inputs are expressed).
struct NodeState {
  ColouringState colouring;
  OrientationState orientation;
  LeaderState leader;
  MajorityState majority;
  TwoColourState two_colour;
  CountingState counting;

  bool operator==(const NodeState&) const = default;
};

using Configuration = std::vector<NodeState>;

}  // namespace popproto
