#pragma once

#include <string>
#include <string_view>

#include "apidomain/common/text.hpp"

namespace apidomain {

/// Porter (1980) suffix stripper, following the author's reference C
/// implementation. Input must be lowercase; words of length <= 2 are
/// returned unchanged.
class PorterStemmer {
 public:
  std::string operator()(std::string_view word) {
    b_.assign(word);
    if (b_.size() <= 2) return b_;
    k_ = static_cast<int>(b_.size()) - 1;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    b_.resize(static_cast<std::size_t>(k_ + 1));
    return b_;
  }

 private:
  bool cons(int i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 || !cons(i - 1);
      default: return true;
    }
  }

  // number of vowel-consonant sequences in b[0..j]
  int m() const {
    int n = 0;
    int i = 0;
    for (;;) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    for (;;) {
      for (;;) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      for (;;) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool doublec(int j) const { return j >= 1 && b_[j] == b_[j - 1] && cons(j); }

  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char ch = b_[i];
    return !(ch == 'w' || ch == 'x' || ch == 'y');
  }

  bool ends(std::string_view s) {
    const int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1), s.size()) != s) return false;
    j_ = k_ - len;
    return true;
  }

  void setto(std::string_view s) {
    b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
    k_ = j_ + static_cast<int>(s.size());
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }

  void r(std::string_view s) {
    if (m() > 0) setto(s);
  }

  void step1ab() {
    if (b_[k_] == 's') {
      if (ends("sses")) k_ -= 2;
      else if (ends("ies")) setto("i");
      else if (b_[k_ - 1] != 's') --k_;
    }
    if (ends("eed")) {
      if (m() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
      if (ends("at")) setto("ate");
      else if (ends("bl")) setto("ble");
      else if (ends("iz")) setto("ize");
      else if (doublec(k_)) {
        --k_;
        const char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else {
        j_ = k_;
        if (m() == 1 && cvc(k_)) setto("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
  }

  void step2() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (ends("ational")) { r("ate"); break; }
        if (ends("tional")) { r("tion"); break; }
        break;
      case 'c':
        if (ends("enci")) { r("ence"); break; }
        if (ends("anci")) { r("ance"); break; }
        break;
      case 'e':
        if (ends("izer")) { r("ize"); break; }
        break;
      case 'l':
        if (ends("bli")) { r("ble"); break; }
        if (ends("alli")) { r("al"); break; }
        if (ends("entli")) { r("ent"); break; }
        if (ends("eli")) { r("e"); break; }
        if (ends("ousli")) { r("ous"); break; }
        break;
      case 'o':
        if (ends("ization")) { r("ize"); break; }
        if (ends("ation")) { r("ate"); break; }
        if (ends("ator")) { r("ate"); break; }
        break;
      case 's':
        if (ends("alism")) { r("al"); break; }
        if (ends("iveness")) { r("ive"); break; }
        if (ends("fulness")) { r("ful"); break; }
        if (ends("ousness")) { r("ous"); break; }
        break;
      case 't':
        if (ends("aliti")) { r("al"); break; }
        if (ends("iviti")) { r("ive"); break; }
        if (ends("biliti")) { r("ble"); break; }
        break;
      case 'g':
        if (ends("logi")) { r("log"); break; }
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (b_[k_]) {
      case 'e':
        if (ends("icate")) { r("ic"); break; }
        if (ends("ative")) { r(""); break; }
        if (ends("alize")) { r("al"); break; }
        break;
      case 'i':
        if (ends("iciti")) { r("ic"); break; }
        break;
      case 'l':
        if (ends("ical")) { r("ic"); break; }
        if (ends("ful")) { r(""); break; }
        break;
      case 's':
        if (ends("ness")) { r(""); break; }
        break;
      default:
        break;
    }
  }

  void step4() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (ends("al")) break;
        return;
      case 'c':
        if (ends("ance") || ends("ence")) break;
        return;
      case 'e':
        if (ends("er")) break;
        return;
      case 'i':
        if (ends("ic")) break;
        return;
      case 'l':
        if (ends("able") || ends("ible")) break;
        return;
      case 'n':
        if (ends("ant") || ends("ement") || ends("ment") || ends("ent")) break;
        return;
      case 'o':
        if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
        if (ends("ou")) break;
        return;
      case 's':
        if (ends("ism")) break;
        return;
      case 't':
        if (ends("ate") || ends("iti")) break;
        return;
      case 'u':
        if (ends("ous")) break;
        return;
      case 'v':
        if (ends("ive")) break;
        return;
      case 'z':
        if (ends("ize")) break;
        return;
      default:
        return;
    }
    if (m() > 1) k_ = j_;
  }

  void step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      const int a = m();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    j_ = k_;
    if (b_[k_] == 'l' && doublec(k_) && m() > 1) --k_;
  }

  std::string b_;
  int k_ = 0;
  int j_ = 0;
};

inline std::string porter_stem(std::string_view word) { return PorterStemmer{}(word); }

/// Light Portuguese stemmer in the style of Savoy (2006): plural and
/// feminine normalization, a few adverbial suffixes, final vowel removal
/// and accent folding. Works on lowercase UTF-8.
inline std::string portuguese_stem(std::string_view word) {
  std::u32string s = text::utf8_decode(word);
  auto ends = [&](std::u32string_view suf) {
    return s.size() >= suf.size() && std::u32string_view(s).substr(s.size() - suf.size()) == suf;
  };
  auto len = [&] { return s.size(); };
  if (len() < 4) return std::string(word);

  // plurals and -mente
  if (len() > 4 && ends(U"es") && (s[len() - 3] == U'r' || s[len() - 3] == U's' ||
                                   s[len() - 3] == U'l' || s[len() - 3] == U'z')) {
    s.resize(len() - 2);
  } else if (len() > 3 && ends(U"ns")) {
    s[len() - 2] = U'm';
    s.resize(len() - 1);
  } else if (len() > 4 && (ends(U"eis") || ends(U"éis"))) {
    s[len() - 3] = U'e';
    s[len() - 2] = U'l';
    s.resize(len() - 1);
  } else if (len() > 4 && ends(U"ais")) {
    s[len() - 2] = U'l';
    s.resize(len() - 1);
  } else if (len() > 4 && ends(U"óis")) {
    s[len() - 3] = U'o';
    s[len() - 2] = U'l';
    s.resize(len() - 1);
  } else if (len() > 4 && ends(U"is")) {
    s[len() - 1] = U'l';
  } else if (len() > 3 && (ends(U"ões") || ends(U"ães"))) {
    s.resize(len() - 1);
    s[len() - 2] = U'ã';
    s[len() - 1] = U'o';
  } else if (len() > 6 && ends(U"mente")) {
    s.resize(len() - 5);
  } else if (len() > 3 && ends(U"s")) {
    s.resize(len() - 1);
  }

  // feminine -> masculine
  if (len() > 3 && s.back() == U'a') {
    if (len() > 7 && (ends(U"inha") || ends(U"iaca") || ends(U"eira"))) {
      s.back() = U'o';
    } else if (len() > 6) {
      if (ends(U"osa") || ends(U"ica") || ends(U"ida") || ends(U"ada") || ends(U"iva") || ends(U"ama")) {
        s.back() = U'o';
      } else if (ends(U"ona")) {
        s[len() - 3] = U'ã';
        s[len() - 2] = U'o';
        s.resize(len() - 1);
      } else if (ends(U"ora")) {
        s.resize(len() - 1);
      } else if (ends(U"esa")) {
        s[len() - 3] = U'ê';
        s.resize(len() - 1);
      } else if (ends(U"na")) {
        s.back() = U'o';
      }
    }
  }

  if (len() > 4 && (s.back() == U'e' || s.back() == U'a' || s.back() == U'o')) s.resize(len() - 1);

  for (auto& c : s) {
    switch (c) {
      case U'à': case U'á': case U'â': case U'ä': c = U'a'; break;
      case U'ò': case U'ó': case U'ô': case U'ö': c = U'o'; break;
      case U'è': case U'é': case U'ê': case U'ë': c = U'e'; break;
      case U'ù': case U'ú': case U'û': case U'ü': c = U'u'; break;
      case U'ì': case U'í': case U'î': case U'ï': c = U'i'; break;
      case U'ç': c = U'c'; break;
      default: break;
    }
  }
  return text::utf8_encode(s);
}

}  // namespace apidomain
