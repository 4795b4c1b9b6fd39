#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockgroup {

/// A subset of the ground set [n] = {1, ..., n} as a packed bit vector.
///
/// Positions are 1-based everywhere in the public interface; internally
/// position p lives at bit (p-1).  Bits above position n are always zero.
/// Symmetric difference of two masks over the same ground set is the
/// word-wise XOR of their bit vectors, so masks form a group under ^ with
/// the empty set as identity and every element its own inverse.
class SubsetMask {
 public:
  SubsetMask() = default;

  explicit SubsetMask(int ground_size) : n_(ground_size) {
    if (ground_size < 0) {
      throw std::invalid_argument("SubsetMask: negative ground size");
    }
    words_.assign(word_count(ground_size), 0);
  }

  static SubsetMask from_positions(int ground_size, const std::vector<int>& positions) {
    SubsetMask s(ground_size);
    for (int p : positions) s.set(p);
    return s;
  }

  static SubsetMask from_positions(int ground_size, std::initializer_list<int> positions) {
    SubsetMask s(ground_size);
    for (int p : positions) s.set(p);
    return s;
  }

  /// The full ground set [n].
  static SubsetMask full(int ground_size) {
    SubsetMask s(ground_size);
    for (auto& w : s.words_) w = ~std::uint64_t{0};
    s.mask_tail();
    return s;
  }

  int ground_size() const { return n_; }

  bool contains(int pos) const {
    check_pos(pos);
    return (words_[static_cast<std::size_t>(pos - 1) / 64] >> ((pos - 1) % 64)) & 1U;
  }

  void set(int pos) {
    check_pos(pos);
    words_[static_cast<std::size_t>(pos - 1) / 64] |= std::uint64_t{1} << ((pos - 1) % 64);
  }

  void reset(int pos) {
    check_pos(pos);
    words_[static_cast<std::size_t>(pos - 1) / 64] &= ~(std::uint64_t{1} << ((pos - 1) % 64));
  }

  void flip(int pos) {
    check_pos(pos);
    words_[static_cast<std::size_t>(pos - 1) / 64] ^= std::uint64_t{1} << ((pos - 1) % 64);
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool empty() const {
    for (std::uint64_t w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  /// Elements in strictly ascending order.
  std::vector<int> positions() const {
    std::vector<int> out;
    out.reserve(count());
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w != 0) {
        out.push_back(static_cast<int>(wi * 64) + std::countr_zero(w) + 1);
        w &= w - 1;
      }
    }
    return out;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  SubsetMask& operator^=(const SubsetMask& other) {
    if (n_ != other.n_) {
      throw std::invalid_argument("SubsetMask: symmetric difference over mismatched ground sets");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
  }

  friend SubsetMask operator^(SubsetMask a, const SubsetMask& b) {
    a ^= b;
    return a;
  }

  bool operator==(const SubsetMask&) const = default;

 private:
  static std::size_t word_count(int n) { return (static_cast<std::size_t>(n) + 63) / 64; }

  void check_pos(int pos) const {
    if (pos < 1 || pos > n_) {
      throw std::out_of_range("SubsetMask: position outside [1, n]");
    }
  }

  void mask_tail() {
    const int tail = n_ % 64;
    if (tail != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << tail) - 1;
    }
  }

  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SubsetMaskHash {
  std::size_t operator()(const SubsetMask& s) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(s.ground_size());
    for (std::uint64_t w : s.words()) {
      h ^= w;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Symmetric difference; requires equal ground sizes.
inline SubsetMask sym_diff(const SubsetMask& a, const SubsetMask& b) { return a ^ b; }

/// Largest circular distance between consecutive elements of a nonempty set,
/// including the wraparound step from the largest element back to the
/// smallest.  A singleton yields n.  The set meets every window of w
/// consecutive positions (mod n) exactly when this gap is <= w.
inline int max_cyclic_gap(const SubsetMask& s) {
  if (s.empty()) {
    throw std::invalid_argument("max_cyclic_gap: empty set");
  }
  const auto& words = s.words();
  int first = -1;
  int prev = -1;
  int best = 0;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    std::uint64_t w = words[wi];
    while (w != 0) {
      const int pos = static_cast<int>(wi * 64) + std::countr_zero(w) + 1;
      if (first < 0) {
        first = pos;
      } else {
        best = std::max(best, pos - prev);
      }
      prev = pos;
      w &= w - 1;
    }
  }
  return std::max(best, first + s.ground_size() - prev);
}

/// True iff s intersects every window {c+1, ..., c+t} taken mod n
/// (positions kept in [1, n]).  The empty set misses every window.
inline bool hits_all_blocks(const SubsetMask& s, int t) {
  if (t < 1 || t > s.ground_size()) {
    throw std::domain_error("hits_all_blocks: need 1 <= t <= n");
  }
  if (s.empty()) return false;
  return max_cyclic_gap(s) <= t;
}

/// Start of the first window of t consecutive positions (mod n) that s
/// misses, scanning the elements of s in ascending order; nullopt when s
/// hits every window.  The empty set misses the window starting at 1.
inline std::optional<int> first_missed_window(const SubsetMask& s, int t) {
  if (t < 1 || t > s.ground_size()) {
    throw std::domain_error("first_missed_window: need 1 <= t <= n");
  }
  if (s.empty()) return 1;
  const int n = s.ground_size();
  const std::vector<int> xs = s.positions();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (xs[i + 1] - xs[i] > t) return xs[i] + 1;
  }
  if (xs.front() + n - xs.back() > t) return xs.back() % n + 1;
  return std::nullopt;
}

/// Image of s under the rotation p -> p + shift (mod n), positions in [1, n].
inline SubsetMask rotate(const SubsetMask& s, int shift) {
  const int n = s.ground_size();
  if (n == 0) return s;
  shift %= n;
  if (shift < 0) shift += n;
  SubsetMask out(n);
  for (int p : s.positions()) {
    out.set((p - 1 + shift) % n + 1);
  }
  return out;
}

/// All distinct cyclic translates of base, in order of first appearance
/// for shifts 0, 1, ..., n-1.
inline std::vector<SubsetMask> cyclic_translates(const SubsetMask& base) {
  const int n = base.ground_size();
  std::vector<SubsetMask> out;
  if (n == 0) {
    out.push_back(base);
    return out;
  }
  for (int c = 0; c < n; ++c) {
    SubsetMask r = rotate(base, c);
    if (std::find(out.begin(), out.end(), r) == out.end()) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Text form: comma-separated ascending positions in braces, e.g. "{1,6,11}";
/// the empty set is "{}".
inline std::string to_set_text(const SubsetMask& s) {
  std::string out = "{";
  bool first = true;
  for (int p : s.positions()) {
    if (!first) out += ',';
    out += std::to_string(p);
    first = false;
  }
  out += '}';
  return out;
}

/// Parses the text form over ground set [n].  Positions must be strictly
/// ascending and within [1, n].
inline SubsetMask parse_set_text(const std::string& text, int ground_size) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  skip_ws();
  if (i >= text.size() || text[i] != '{') {
    throw std::invalid_argument("parse_set_text: expected '{'");
  }
  ++i;
  SubsetMask s(ground_size);
  int last = 0;
  skip_ws();
  if (i < text.size() && text[i] == '}') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      std::size_t len = 0;
      int value = 0;
      while (i + len < text.size() && text[i + len] >= '0' && text[i + len] <= '9') {
        value = value * 10 + (text[i + len] - '0');
        ++len;
      }
      if (len == 0) throw std::invalid_argument("parse_set_text: expected a position");
      i += len;
      if (value <= last) {
        throw std::invalid_argument("parse_set_text: positions must be strictly ascending");
      }
      last = value;
      s.set(value);  // range-checked
      skip_ws();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < text.size() && text[i] == '}') {
        ++i;
        break;
      }
      throw std::invalid_argument("parse_set_text: expected ',' or '}'");
    }
  }
  skip_ws();
  if (i != text.size()) {
    throw std::invalid_argument("parse_set_text: trailing characters");
  }
  return s;
}

}  // namespace blockgroup
