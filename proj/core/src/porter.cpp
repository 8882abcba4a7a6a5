#include "gtpm/porter.hpp"

#include <cstring>

namespace gtpm {
namespace {

// Working state for one word. `last` is the index of the final letter,
// `stem` the final letter of the stem under the most recently matched
// suffix (-1 when the suffix consumes the whole word).
struct Stemmer {
  std::string w;
  int last = -1;
  int stem = -1;

  bool is_consonant(int i) const {
    switch (w[static_cast<size_t>(i)]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // Measure of w[0..stem]: the m in [C](VC)^m[V].
  int measure() const {
    int m = 0;
    int i = 0;
    while (true) {
      if (i > stem) return m;
      if (!is_consonant(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > stem) return m;
        if (is_consonant(i)) break;
        ++i;
      }
      ++i;
      ++m;
      while (true) {
        if (i > stem) return m;
        if (!is_consonant(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool stem_has_vowel() const {
    for (int i = 0; i <= stem; ++i)
      if (!is_consonant(i)) return true;
    return false;
  }

  // *d: double consonant ending at `at`.
  bool double_consonant(int at) const {
    if (at < 1) return false;
    return w[static_cast<size_t>(at)] == w[static_cast<size_t>(at - 1)] &&
           is_consonant(at);
  }

  // *o: consonant-vowel-consonant ending at `at`, final consonant not w/x/y.
  bool cvc(int at) const {
    if (at < 2) return false;
    if (!is_consonant(at) || is_consonant(at - 1) || !is_consonant(at - 2))
      return false;
    char c = w[static_cast<size_t>(at)];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(const char* suffix) {
    int len = static_cast<int>(std::strlen(suffix));
    if (len > last + 1) return false;
    if (std::memcmp(w.data() + (last + 1 - len), suffix,
                    static_cast<size_t>(len)) != 0)
      return false;
    stem = last - len;
    return true;
  }

  void set_suffix(const char* s) {
    w.resize(static_cast<size_t>(stem + 1));
    w += s;
    last = static_cast<int>(w.size()) - 1;
  }

  void drop_suffix() {
    w.resize(static_cast<size_t>(stem + 1));
    last = stem;
  }

  void drop_last_letter() {
    w.pop_back();
    last = static_cast<int>(w.size()) - 1;
  }

  // Steps 2 and 3 rule shape: longest matching suffix decides; the
  // replacement happens only when m(stem) > 0. Returns true on match.
  bool map_suffix(const char* suffix, const char* replacement) {
    if (!ends(suffix)) return false;
    if (measure() > 0) set_suffix(replacement);
    return true;
  }

  void step_1a() {
    if (w.back() != 's') return;
    if (ends("sses")) {
      set_suffix("ss");
    } else if (ends("ies")) {
      set_suffix("i");
    } else if (!ends("ss") && ends("s")) {
      drop_suffix();
    }
  }

  void step_1b() {
    if (ends("eed")) {
      if (measure() > 0) set_suffix("ee");
      return;
    }
    if ((ends("ed") || ends("ing")) && stem_has_vowel()) {
      drop_suffix();
      if (ends("at") || ends("bl") || ends("iz")) {
        w.push_back('e');
        last = static_cast<int>(w.size()) - 1;
      } else if (double_consonant(last)) {
        char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') drop_last_letter();
      } else {
        stem = last;
        if (measure() == 1 && cvc(last)) {
          w.push_back('e');
          last = static_cast<int>(w.size()) - 1;
        }
      }
    }
  }

  void step_1c() {
    if (ends("y") && stem_has_vowel()) w[static_cast<size_t>(last)] = 'i';
  }

  void step_2() {
    if (last < 1) return;
    switch (w[static_cast<size_t>(last - 1)]) {
      case 'a':
        if (map_suffix("ational", "ate")) return;
        if (map_suffix("tional", "tion")) return;
        return;
      case 'c':
        if (map_suffix("enci", "ence")) return;
        if (map_suffix("anci", "ance")) return;
        return;
      case 'e':
        if (map_suffix("izer", "ize")) return;
        return;
      case 'l':
        if (map_suffix("abli", "able")) return;
        if (map_suffix("alli", "al")) return;
        if (map_suffix("entli", "ent")) return;
        if (map_suffix("eli", "e")) return;
        if (map_suffix("ousli", "ous")) return;
        return;
      case 'o':
        if (map_suffix("ization", "ize")) return;
        if (map_suffix("ation", "ate")) return;
        if (map_suffix("ator", "ate")) return;
        return;
      case 's':
        if (map_suffix("alism", "al")) return;
        if (map_suffix("iveness", "ive")) return;
        if (map_suffix("fulness", "ful")) return;
        if (map_suffix("ousness", "ous")) return;
        return;
      case 't':
        if (map_suffix("aliti", "al")) return;
        if (map_suffix("iviti", "ive")) return;
        if (map_suffix("biliti", "ble")) return;
        return;
      default:
        return;
    }
  }

  void step_3() {
    switch (w[static_cast<size_t>(last)]) {
      case 'e':
        if (map_suffix("icate", "ic")) return;
        if (map_suffix("ative", "")) return;
        if (map_suffix("alize", "al")) return;
        return;
      case 'i':
        if (map_suffix("iciti", "ic")) return;
        return;
      case 'l':
        if (map_suffix("ical", "ic")) return;
        if (map_suffix("ful", "")) return;
        return;
      case 's':
        if (map_suffix("ness", "")) return;
        return;
      default:
        return;
    }
  }

  void step_4() {
    if (last < 1) return;
    bool matched = false;
    switch (w[static_cast<size_t>(last - 1)]) {
      case 'a': matched = ends("al"); break;
      case 'c': matched = ends("ance") || ends("ence"); break;
      case 'e': matched = ends("er"); break;
      case 'i': matched = ends("ic"); break;
      case 'l': matched = ends("able") || ends("ible"); break;
      case 'n':
        matched = ends("ant") || ends("ement") || ends("ment") || ends("ent");
        break;
      case 'o':
        if (ends("ion")) {
          matched = stem >= 0 && (w[static_cast<size_t>(stem)] == 's' ||
                                  w[static_cast<size_t>(stem)] == 't');
        } else {
          matched = ends("ou");
        }
        break;
      case 's': matched = ends("ism"); break;
      case 't': matched = ends("ate") || ends("iti"); break;
      case 'u': matched = ends("ous"); break;
      case 'v': matched = ends("ive"); break;
      case 'z': matched = ends("ize"); break;
      default: break;
    }
    if (matched && measure() > 1) drop_suffix();
  }

  void step_5a() {
    if (w.back() != 'e') return;
    stem = last - 1;
    int m = measure();
    if (m > 1 || (m == 1 && !cvc(last - 1))) drop_suffix();
  }

  void step_5b() {
    stem = last;
    if (measure() > 1 && double_consonant(last) && w.back() == 'l')
      drop_last_letter();
  }
};

bool all_lower_ascii(const std::string& word) {
  for (char c : word)
    if (c < 'a' || c > 'z') return false;
  return true;
}

}  // namespace

std::string porter_stem(const std::string& word) {
  if (word.size() < 3 || !all_lower_ascii(word)) return word;
  Stemmer s;
  s.w = word;
  s.last = static_cast<int>(word.size()) - 1;
  s.step_1a();
  s.step_1b();
  s.step_1c();
  s.step_2();
  s.step_3();
  s.step_4();
  s.step_5a();
  s.step_5b();
  return s.w;
}

std::string porter_stem_fixpoint(const std::string& word) {
  std::string current = word;
  for (int i = 0; i < 8; ++i) {
    std::string next = porter_stem(current);
    if (next == current) return current;
    current = std::move(next);
  }
  return current;
}

}  // namespace gtpm
