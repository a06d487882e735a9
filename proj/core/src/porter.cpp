#include "tweetdyn/porter.hpp"

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace tweetdyn {
namespace {

bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// y is a consonant at the start of a word or after a vowel
std::vector<bool> consonant_flags(std::string_view w) {
  std::vector<bool> flags(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel_letter(w[i])) {
      flags[i] = false;
    } else if (w[i] == 'y') {
      flags[i] = i == 0 ? true : !flags[i - 1];
    } else {
      flags[i] = true;
    }
  }
  return flags;
}

bool is_consonant(std::string_view w, std::size_t i) { return consonant_flags(w.substr(0, i + 1))[i]; }

// number of vowel-run/consonant-run pairs
int measure(std::string_view stem) {
  const auto flags = consonant_flags(stem);
  int m = 0;
  for (std::size_t i = 1; i < flags.size(); ++i) {
    if (!flags[i - 1] && flags[i]) ++m;
  }
  return m;
}

bool contains_vowel(std::string_view stem) {
  const auto flags = consonant_flags(stem);
  return std::find(flags.begin(), flags.end(), false) != flags.end();
}

bool ends_double_consonant(std::string_view w) {
  const std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const auto flags = consonant_flags(w);
  return flags[n - 3] && !flags[n - 2] && flags[n - 1] && w[n - 1] != 'w' && w[n - 1] != 'x' &&
         w[n - 1] != 'y';
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

enum class Cond { None, MeasureGt0, MeasureGt1 };

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  Cond cond;
};

bool holds(Cond cond, std::string_view stem) {
  switch (cond) {
    case Cond::None: return true;
    case Cond::MeasureGt0: return measure(stem) > 0;
    case Cond::MeasureGt1: return measure(stem) > 1;
  }
  return false;
}

// The first rule whose suffix matches decides; if its condition fails the
// word is left alone.
void apply_first(std::string& w, std::initializer_list<Rule> rules) {
  for (const auto& r : rules) {
    if (!ends_with(w, r.suffix)) continue;
    const std::string_view stem(w.data(), w.size() - r.suffix.size());
    if (holds(r.cond, stem)) {
      w.resize(stem.size());
      w.append(r.replacement);
    }
    return;
  }
}

void step1a(std::string& w) {
  apply_first(w, {{"sses", "ss", Cond::None}, {"ies", "i", Cond::None}, {"ss", "ss", Cond::None},
                  {"s", "", Cond::None}});
}

void step1b(std::string& w) {
  if (ends_with(w, "eed")) {
    if (measure(std::string_view(w).substr(0, w.size() - 3)) > 0) w.resize(w.size() - 1);
    return;
  }
  bool stripped = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (ends_with(w, suffix) && contains_vowel(std::string_view(w).substr(0, w.size() - suffix.size()))) {
      w.resize(w.size() - suffix.size());
      stripped = true;
      break;
    }
  }
  if (!stripped) return;

  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w.push_back('e');
  } else if (ends_double_consonant(w)) {
    const char last = w.back();
    if (last != 'l' && last != 's' && last != 'z') w.pop_back();
  } else if (measure(w) == 1 && ends_cvc(w)) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (ends_with(w, "y") && contains_vowel(std::string_view(w).substr(0, w.size() - 1))) w.back() = 'i';
}

void step2(std::string& w) {
  constexpr Cond c = Cond::MeasureGt0;
  apply_first(w, {{"ational", "ate", c}, {"tional", "tion", c}, {"enci", "ence", c},
                  {"anci", "ance", c},   {"izer", "ize", c},    {"abli", "able", c},
                  {"alli", "al", c},     {"entli", "ent", c},   {"eli", "e", c},
                  {"ousli", "ous", c},   {"ization", "ize", c}, {"ation", "ate", c},
                  {"ator", "ate", c},    {"alism", "al", c},    {"iveness", "ive", c},
                  {"fulness", "ful", c}, {"ousness", "ous", c}, {"aliti", "al", c},
                  {"iviti", "ive", c},   {"biliti", "ble", c}});
}

void step3(std::string& w) {
  constexpr Cond c = Cond::MeasureGt0;
  apply_first(w, {{"icate", "ic", c}, {"ative", "", c}, {"alize", "al", c}, {"iciti", "ic", c},
                  {"ical", "ic", c}, {"ful", "", c}, {"ness", "", c}});
}

void step4(std::string& w) {
  constexpr Cond c = Cond::MeasureGt1;
  for (std::string_view suffix : {"al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
                                  "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive",
                                  "ize"}) {
    if (!ends_with(w, suffix)) continue;
    const std::string_view stem(w.data(), w.size() - suffix.size());
    bool ok = holds(c, stem);
    if (suffix == "ion") ok = ok && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
    if (ok) w.resize(stem.size());
    return;
  }
}

void step5(std::string& w) {
  if (ends_with(w, "e")) {
    const std::string_view stem(w.data(), w.size() - 1);
    const int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) w.pop_back();
  }
  if (ends_with(w, "ll") && measure(std::string_view(w).substr(0, w.size() - 1)) > 1) w.pop_back();
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  if (w.empty()) return w;
  for (char ch : w) {
    if (ch < 'a' || ch > 'z') return w;
  }
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5(w);
  return w;
}

}  // namespace tweetdyn
