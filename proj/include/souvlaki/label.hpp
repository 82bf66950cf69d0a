#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "souvlaki/error.hpp"

namespace souvlaki {

enum class LabelKind : std::uint8_t {
  Tree,    // vertex of the ternary tree / H2: (depth, code)
  W,       // r_i^k of the Baumslag-Solitar strip: (i, k)
  Pair,    // meatball vertex (t, w): (meatball, height, t-code, k)
  Skewer,  // s_x on the ray S: (x)
  Gadget,  // gadget vertex: (gid-depth, gid-code, level, index)
  Dyadic,  // dyadic cube: (copy-depth, copy-code, depth, code)
  Node,    // binary skeleton node: (depth, code)
  Aux,     // helper vertex: (role, a, b, parent-kind, parent coords...)
};

enum class AuxRole : std::int32_t { Subdivision = 0, FanUp = 1, FanDown = 2 };

/// Tagged coordinate naming a vertex inside the construction that produced
/// it. Value type; equality and hashing are structural, and the canonical
/// string is both the serialization key and the sort key.
class VertexLabel {
 public:
  static constexpr std::size_t kMaxCoords = 8;

  VertexLabel() = default;

  static VertexLabel tree(int depth, std::int64_t code) {
    check_digits(depth, code, 3, "tree address");
    return make(LabelKind::Tree, {depth, static_cast<std::int32_t>(code)});
  }
  static VertexLabel w(int height, std::int64_t k) {
    if (height < 0) throw DomainError("W height must be non-negative");
    return make(LabelKind::W, {height, narrow(k)});
  }
  static VertexLabel pair(int meatball, int height, std::int64_t tcode, std::int64_t k) {
    check_digits(height, tcode, 3, "pair tree address");
    return make(LabelKind::Pair, {meatball, height, static_cast<std::int32_t>(tcode), narrow(k)});
  }
  static VertexLabel skewer(std::int64_t x) {
    if (x < 0) throw DomainError("skewer index must be non-negative");
    return make(LabelKind::Skewer, {narrow(x)});
  }
  static VertexLabel gadget(int gid_depth, std::int64_t gid_code, int level, std::int64_t index) {
    check_digits(gid_depth, gid_code, 2, "gadget id");
    return make(LabelKind::Gadget,
                {gid_depth, static_cast<std::int32_t>(gid_code), level, narrow(index)});
  }
  static VertexLabel dyadic(int copy_depth, std::int64_t copy_code, int depth, std::int64_t code) {
    check_digits(copy_depth, copy_code, 2, "cube copy id");
    check_digits(depth, code, 8, "dyadic address");
    return make(LabelKind::Dyadic, {copy_depth, static_cast<std::int32_t>(copy_code), depth,
                                    static_cast<std::int32_t>(code)});
  }
  static VertexLabel node(int depth, std::int64_t code) {
    check_digits(depth, code, 2, "binary node address");
    return make(LabelKind::Node, {depth, static_cast<std::int32_t>(code)});
  }
  static VertexLabel aux(AuxRole role, std::int64_t a, std::int64_t b, const VertexLabel& parent) {
    if (parent.kind_ == LabelKind::Aux || parent.size_ > kMaxCoords - 4)
      throw DomainError("aux parent must be a non-aux label with at most 4 coordinates");
    VertexLabel l;
    l.kind_ = LabelKind::Aux;
    l.c_[0] = static_cast<std::int32_t>(role);
    l.c_[1] = narrow(a);
    l.c_[2] = narrow(b);
    l.c_[3] = static_cast<std::int32_t>(parent.kind_);
    for (std::size_t i = 0; i < parent.size_; ++i) l.c_[4 + i] = parent.c_[i];
    l.size_ = static_cast<std::uint8_t>(4 + parent.size_);
    return l;
  }

  LabelKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  std::int32_t operator[](std::size_t i) const { return c_[i]; }

  /// Parent of an Aux label.
  VertexLabel aux_parent() const {
    if (kind_ != LabelKind::Aux) throw DomainError("not an aux label");
    VertexLabel p;
    p.kind_ = static_cast<LabelKind>(c_[3]);
    p.size_ = static_cast<std::uint8_t>(size_ - 4);
    for (std::size_t i = 0; i < p.size_; ++i) p.c_[i] = c_[4 + i];
    return p;
  }

  std::string canonical() const {
    std::string s;
    s.reserve(24);
    switch (kind_) {
      case LabelKind::Tree:
        s += "t:";
        append_digits(s, c_[0], c_[1], 3);
        break;
      case LabelKind::W:
        s += "w:";
        append_int(s, c_[0]);
        s += ',';
        append_int(s, c_[1]);
        break;
      case LabelKind::Pair:
        s += 'p';
        append_int(s, c_[0]);
        s += ':';
        append_digits(s, c_[1], c_[2], 3);
        s += '|';
        append_int(s, c_[1]);
        s += ',';
        append_int(s, c_[3]);
        break;
      case LabelKind::Skewer:
        s += "s:";
        append_int(s, c_[0]);
        break;
      case LabelKind::Gadget:
        s += "g:";
        append_digits(s, c_[0], c_[1], 2);
        s += '|';
        append_int(s, c_[2]);
        s += ',';
        append_int(s, c_[3]);
        break;
      case LabelKind::Dyadic:
        s += "d:";
        append_digits(s, c_[0], c_[1], 2);
        s += '|';
        append_digits(s, c_[2], c_[3], 8);
        break;
      case LabelKind::Node:
        s += "b:";
        append_digits(s, c_[0], c_[1], 2);
        break;
      case LabelKind::Aux:
        s += "a:";
        s += role_name(static_cast<AuxRole>(c_[0]));
        s += '.';
        append_int(s, c_[1]);
        s += '.';
        append_int(s, c_[2]);
        s += '@';
        s += aux_parent().canonical();
        break;
    }
    return s;
  }

  static VertexLabel parse(std::string_view text) {
    Cursor cur{text, text};
    VertexLabel l = parse_one(cur);
    if (!cur.rest.empty()) cur.fail("trailing characters");
    return l;
  }

  friend bool operator==(const VertexLabel& a, const VertexLabel& b) {
    return a.kind_ == b.kind_ && a.size_ == b.size_ && a.c_ == b.c_;
  }

  std::size_t hash() const {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(kind_);
    for (std::size_t i = 0; i < size_; ++i) {
      h ^= static_cast<std::uint32_t>(c_[i]);
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  LabelKind kind_ = LabelKind::Skewer;
  std::uint8_t size_ = 0;
  std::array<std::int32_t, kMaxCoords> c_{};

  static VertexLabel make(LabelKind kind, std::initializer_list<std::int32_t> coords) {
    VertexLabel l;
    l.kind_ = kind;
    for (auto v : coords) l.c_[l.size_++] = v;
    return l;
  }

  static std::int32_t narrow(std::int64_t v) {
    if (v < INT32_MIN || v > INT32_MAX) throw DomainError("label coordinate out of range");
    return static_cast<std::int32_t>(v);
  }

  static void check_digits(int depth, std::int64_t code, int base, const char* what) {
    if (depth < 0) throw DomainError(std::string(what) + ": negative depth");
    std::int64_t limit = 1;
    for (int i = 0; i < depth; ++i) {
      limit *= base;
      if (limit > INT32_MAX) throw DomainError(std::string(what) + ": too deep");
    }
    if (code < 0 || code >= limit) throw DomainError(std::string(what) + ": code out of range");
  }

  static void append_int(std::string& s, std::int64_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    s.append(buf, res.ptr);
  }

  static void append_digits(std::string& s, int depth, std::int64_t code, int base) {
    std::size_t start = s.size();
    s.append(static_cast<std::size_t>(depth), '0');
    for (int i = depth - 1; i >= 0; --i) {
      s[start + static_cast<std::size_t>(i)] = static_cast<char>('0' + code % base);
      code /= base;
    }
  }

  static const char* role_name(AuxRole r) {
    switch (r) {
      case AuxRole::Subdivision: return "sub";
      case AuxRole::FanUp: return "fan+";
      case AuxRole::FanDown: return "fan-";
    }
    return "?";
  }

  struct Cursor {
    std::string_view whole;
    std::string_view rest;
    [[noreturn]] void fail(const char* why) const {
      throw DomainError("cannot parse label '" + std::string(whole) + "': " + why);
    }
    void expect(std::string_view token) {
      if (rest.substr(0, token.size()) != token) fail("unexpected token");
      rest.remove_prefix(token.size());
    }
    std::int64_t integer() {
      std::int64_t v = 0;
      auto res = std::from_chars(rest.data(), rest.data() + rest.size(), v);
      if (res.ec != std::errc{}) fail("expected integer");
      rest.remove_prefix(static_cast<std::size_t>(res.ptr - rest.data()));
      return v;
    }
    std::pair<int, std::int64_t> digits(int base) {
      int depth = 0;
      std::int64_t code = 0;
      while (!rest.empty() && rest.front() >= '0' && rest.front() < '0' + base) {
        code = code * base + (rest.front() - '0');
        ++depth;
        if (depth > 31) fail("address too long");
        rest.remove_prefix(1);
      }
      return {depth, code};
    }
  };

  static VertexLabel parse_one(Cursor& cur) {
    if (cur.rest.size() < 2) cur.fail("too short");
    char tag = cur.rest.front();
    switch (tag) {
      case 't': {
        cur.expect("t:");
        auto [d, c] = cur.digits(3);
        return tree(d, c);
      }
      case 'w': {
        cur.expect("w:");
        auto i = cur.integer();
        cur.expect(",");
        auto k = cur.integer();
        return w(static_cast<int>(i), k);
      }
      case 'p': {
        cur.expect("p");
        auto m = cur.integer();
        cur.expect(":");
        auto [d, c] = cur.digits(3);
        cur.expect("|");
        auto i = cur.integer();
        if (i != d) cur.fail("pair height disagrees with tree address");
        cur.expect(",");
        auto k = cur.integer();
        return pair(static_cast<int>(m), d, c, k);
      }
      case 's': {
        cur.expect("s:");
        return skewer(cur.integer());
      }
      case 'g': {
        cur.expect("g:");
        auto [d, c] = cur.digits(2);
        cur.expect("|");
        auto level = cur.integer();
        cur.expect(",");
        auto idx = cur.integer();
        return gadget(d, c, static_cast<int>(level), idx);
      }
      case 'd': {
        cur.expect("d:");
        auto [cd, cc] = cur.digits(2);
        cur.expect("|");
        auto [d, c] = cur.digits(8);
        return dyadic(cd, cc, d, c);
      }
      case 'b': {
        cur.expect("b:");
        auto [d, c] = cur.digits(2);
        return node(d, c);
      }
      case 'a': {
        cur.expect("a:");
        AuxRole role;
        if (cur.rest.substr(0, 3) == "sub") {
          role = AuxRole::Subdivision;
          cur.expect("sub");
        } else if (cur.rest.substr(0, 4) == "fan+") {
          role = AuxRole::FanUp;
          cur.expect("fan+");
        } else if (cur.rest.substr(0, 4) == "fan-") {
          role = AuxRole::FanDown;
          cur.expect("fan-");
        } else {
          cur.fail("unknown aux role");
        }
        cur.expect(".");
        auto a = cur.integer();
        cur.expect(".");
        auto b = cur.integer();
        cur.expect("@");
        VertexLabel parent = parse_one(cur);
        return aux(role, a, b, parent);
      }
      default:
        cur.fail("unknown label tag");
    }
  }
};

}  // namespace souvlaki

template <>
struct std::hash<souvlaki::VertexLabel> {
  std::size_t operator()(const souvlaki::VertexLabel& l) const noexcept { return l.hash(); }
};
