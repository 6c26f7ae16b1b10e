#pragma once

#include <cctype>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace geoprobe::test_support {

// Structural mutations of canonical WKT. Every mutation breaks the grammar
// or a geometry invariant, so a correct parser must reject all of them.
enum class Mutation {
  DropClosingParen,
  DropOpeningParen,
  Truncate,
  DropOrdinate,
  ExtraOrdinate,
  NonNumericOrdinate,
  DoubleComma,
  TrailingJunk,
  UnknownKeyword,
  EmptyParens,
  UnclosedRing,
};

inline constexpr Mutation kAllMutations[] = {
    Mutation::DropClosingParen, Mutation::DropOpeningParen, Mutation::Truncate,
    Mutation::DropOrdinate,     Mutation::ExtraOrdinate,    Mutation::NonNumericOrdinate,
    Mutation::DoubleComma,      Mutation::TrailingJunk,     Mutation::UnknownKeyword,
    Mutation::EmptyParens,      Mutation::UnclosedRing,
};

inline const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::DropClosingParen: return "drop_closing_paren";
    case Mutation::DropOpeningParen: return "drop_opening_paren";
    case Mutation::Truncate: return "truncate";
    case Mutation::DropOrdinate: return "drop_ordinate";
    case Mutation::ExtraOrdinate: return "extra_ordinate";
    case Mutation::NonNumericOrdinate: return "non_numeric_ordinate";
    case Mutation::DoubleComma: return "double_comma";
    case Mutation::TrailingJunk: return "trailing_junk";
    case Mutation::UnknownKeyword: return "unknown_keyword";
    case Mutation::EmptyParens: return "empty_parens";
    case Mutation::UnclosedRing: return "unclosed_ring";
  }
  return "?";
}

// [begin, end) spans of the numbers in canonical WKT, in order (x, y, x, y...).
inline std::vector<std::pair<std::size_t, std::size_t>> number_spans(const std::string& wkt) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t open = wkt.find('(');
  for (std::size_t i = open; i < wkt.size();) {
    const char c = wkt[i];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
      std::size_t j = i;
      while (j < wkt.size() && wkt[j] != ' ' && wkt[j] != ',' && wkt[j] != ')') ++j;
      out.emplace_back(i, j);
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

// Returns the mutated text, or an empty string when the mutation does not
// apply (UnclosedRing on a non-polygon).
inline std::string mutate(const std::string& wkt, Mutation m, std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const auto nums = number_spans(wkt);
  std::string s = wkt;
  switch (m) {
    case Mutation::DropClosingParen: s.erase(s.rfind(')'), 1); return s;
    case Mutation::DropOpeningParen: s.erase(s.find('('), 1); return s;
    case Mutation::Truncate: return s.substr(0, 1 + pick(s.size() - 1));
    case Mutation::DropOrdinate: {
      // Remove a y value together with the space before it.
      const auto [b, e] = nums[2 * pick(nums.size() / 2) + 1];
      s.erase(b - 1, e - b + 1);
      return s;
    }
    case Mutation::ExtraOrdinate: s.insert(nums[2 * pick(nums.size() / 2) + 1].second, " 7"); return s;
    case Mutation::NonNumericOrdinate: {
      const auto [b, e] = nums[pick(nums.size())];
      s.replace(b, e - b, "x");
      return s;
    }
    case Mutation::DoubleComma: {
      const auto [b, e] = nums[2 * pick(nums.size() / 2) + 1];
      s.insert(e, ",");
      if (s[e + 1] != ',') s.insert(e, ",");
      return s;
    }
    case Mutation::TrailingJunk: return s + " )";
    case Mutation::UnknownKeyword: s.insert(s.find(' '), "S"); return s;
    case Mutation::EmptyParens: return s.substr(0, s.find('(')) + "()";
    case Mutation::UnclosedRing: {
      if (s.rfind("POLYGON", 0) != 0) return {};
      // The y of the closing vertex of the shell is the number just before the first ')'.
      const std::size_t close = s.find(')');
      std::size_t idx = 0;
      while (idx + 1 < nums.size() && nums[idx + 1].first < close) ++idx;
      const auto [b, e] = nums[idx];
      const std::string repl = s.substr(b, e - b) == "12345.5" ? "54321.5" : "12345.5";
      s.replace(b, e - b, repl);
      return s;
    }
  }
  return s;
}

}  // namespace geoprobe::test_support
