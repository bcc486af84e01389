#include "iumix/translit.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "iumix/utf8.hpp"

namespace iumix {

namespace {

constexpr char kSeparator = '\'';

struct BuiltinEntry {
  std::uint32_t cp;
  const char* roman;
};

// ICI standard; finals are the bare consonant, long vowels double the letter,
// lateral fricative is '&'.
constexpr BuiltinEntry kBuiltin[] = {
    {0x1403, "i"},    {0x1404, "ii"},    {0x1405, "u"},    {0x1406, "uu"},
    {0x140A, "a"},    {0x140B, "aa"},

    {0x1431, "pi"},   {0x1432, "pii"},   {0x1433, "pu"},   {0x1434, "puu"},
    {0x1438, "pa"},   {0x1439, "paa"},   {0x1449, "p"},

    {0x144E, "ti"},   {0x144F, "tii"},   {0x1450, "tu"},   {0x1451, "tuu"},
    {0x1455, "ta"},   {0x1456, "taa"},   {0x1466, "t"},

    {0x146D, "ki"},   {0x146E, "kii"},   {0x146F, "ku"},   {0x1470, "kuu"},
    {0x1472, "ka"},   {0x1473, "kaa"},   {0x1483, "k"},

    {0x148B, "gi"},   {0x148C, "gii"},   {0x148D, "gu"},   {0x148E, "guu"},
    {0x1490, "ga"},   {0x1491, "gaa"},   {0x14A1, "g"},

    {0x14A5, "mi"},   {0x14A6, "mii"},   {0x14A7, "mu"},   {0x14A8, "muu"},
    {0x14AA, "ma"},   {0x14AB, "maa"},   {0x14BB, "m"},

    {0x14C2, "ni"},   {0x14C3, "nii"},   {0x14C4, "nu"},   {0x14C5, "nuu"},
    {0x14C7, "na"},   {0x14C8, "naa"},   {0x14D0, "n"},

    {0x14D5, "li"},   {0x14D6, "lii"},   {0x14D7, "lu"},   {0x14D8, "luu"},
    {0x14DA, "la"},   {0x14DB, "laa"},   {0x14EA, "l"},

    {0x14EF, "si"},   {0x14F0, "sii"},   {0x14F1, "su"},   {0x14F2, "suu"},
    {0x14F4, "sa"},   {0x14F5, "saa"},   {0x1505, "s"},

    {0x1528, "ji"},   {0x1529, "jii"},   {0x152A, "ju"},   {0x152B, "juu"},
    {0x152D, "ja"},   {0x152E, "jaa"},   {0x153E, "j"},

    {0x1546, "ri"},   {0x1547, "rii"},   {0x1548, "ru"},   {0x1549, "ruu"},
    {0x154B, "ra"},   {0x154C, "raa"},   {0x1550, "r"},

    {0x1555, "vi"},   {0x1556, "vii"},   {0x1557, "vu"},   {0x1558, "vuu"},
    {0x1559, "va"},   {0x155A, "vaa"},   {0x155D, "v"},

    {0x157F, "qi"},   {0x1580, "qii"},   {0x1581, "qu"},   {0x1582, "quu"},
    {0x1583, "qa"},   {0x1584, "qaa"},   {0x1585, "q"},

    {0x158F, "ngi"},  {0x1590, "ngii"},  {0x1591, "ngu"},  {0x1592, "nguu"},
    {0x1593, "nga"},  {0x1594, "ngaa"},  {0x1595, "ng"},

    {0x1671, "nngi"}, {0x1672, "nngii"}, {0x1673, "nngu"}, {0x1674, "nnguu"},
    {0x1675, "nnga"}, {0x1676, "nngaa"}, {0x1596, "nng"},

    {0x15A0, "&i"},   {0x15A1, "&ii"},   {0x15A2, "&u"},   {0x15A3, "&uu"},
    {0x15A4, "&a"},   {0x15A5, "&aa"},   {0x15A6, "&"},

    {0x157C, "h"},
};

char32_t parse_codepoint(const std::string& token, const std::string& where) {
  std::string_view hex = token;
  if (hex.size() > 2 && (hex.substr(0, 2) == "U+" || hex.substr(0, 2) == "u+" ||
                         hex.substr(0, 2) == "0x" || hex.substr(0, 2) == "0X")) {
    hex.remove_prefix(2);
  }
  if (hex.empty() || hex.size() > 6) {
    throw std::runtime_error(where + ": bad codepoint '" + token + "'");
  }
  std::uint32_t value = 0;
  for (const char c : hex) {
    value <<= 4;
    if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
    else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') value |= static_cast<std::uint32_t>(c - 'A' + 10);
    else throw std::runtime_error(where + ": bad codepoint '" + token + "'");
  }
  if (value == 0 || value > 0x10FFFF) {
    throw std::runtime_error(where + ": codepoint out of range '" + token + "'");
  }
  return static_cast<char32_t>(value);
}

}  // namespace

TranslitTable::TranslitTable(std::vector<TranslitEntry> entries)
    : entries_(std::move(entries)) {
  Node root;
  for (auto& c : root.child) c = -1;
  root.terminal = 0;
  trie_.push_back(root);

  for (std::size_t idx = 0; idx < entries_.size(); ++idx) {
    const auto& e = entries_[idx];
    if (e.roman.empty()) throw std::invalid_argument("empty roman string in table");
    if (e.roman.find(kSeparator) != std::string::npos) {
      throw std::invalid_argument("roman string may not contain apostrophe: " + e.roman);
    }
    if (!to_roman_.emplace(e.syllabic, static_cast<std::uint32_t>(idx)).second) {
      throw std::invalid_argument("duplicate syllabic codepoint in table");
    }
    std::int32_t node = 0;
    for (const char ch : e.roman) {
      const auto b = static_cast<unsigned char>(ch);
      if (trie_[node].child[b] < 0) {
        trie_[node].child[b] = static_cast<std::int32_t>(trie_.size());
        Node fresh;
        for (auto& c : fresh.child) c = -1;
        fresh.terminal = 0;
        trie_.push_back(fresh);
      }
      node = trie_[node].child[b];
    }
    if (trie_[node].terminal != 0) {
      throw std::invalid_argument("duplicate roman string in table: " + e.roman);
    }
    trie_[node].terminal = e.syllabic;
    max_roman_len_ = std::max(max_roman_len_, e.roman.size());
  }
}

const TranslitTable& TranslitTable::builtin() {
  static const TranslitTable table = [] {
    std::vector<TranslitEntry> entries;
    entries.reserve(std::size(kBuiltin));
    for (const auto& e : kBuiltin) {
      entries.push_back({static_cast<char32_t>(e.cp), e.roman});
    }
    return TranslitTable(std::move(entries));
  }();
  return table;
}

TranslitTable TranslitTable::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<TranslitEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string cp_token, roman;
    if (!(fields >> cp_token >> roman)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected codepoint and roman string");
    }
    const std::string where = path + ":" + std::to_string(lineno);
    entries.push_back({parse_codepoint(cp_token, where), roman});
  }
  return TranslitTable(std::move(entries));
}

std::size_t TranslitTable::longest_match(std::string_view text, std::size_t pos,
                                         char32_t& cp) const {
  std::int32_t node = 0;
  std::size_t best = 0;
  cp = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    node = trie_[node].child[static_cast<unsigned char>(text[i])];
    if (node < 0) break;
    if (trie_[node].terminal != 0) {
      best = i + 1 - pos;
      cp = trie_[node].terminal;
    }
  }
  return best;
}

std::string TranslitTable::romanize(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  // Unit starts of the current run of mapped codepoints, with their roman
  // lengths; a junction is safe iff greedy matching still lands on every
  // intended start. Only starts within max_roman_len_-1 bytes of the new
  // unit can be disturbed by it.
  std::vector<std::pair<std::size_t, std::size_t>> run;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = 0;
    const std::size_t len = utf8::decode(text, i, cp);
    if (len == 0) {  // malformed byte: pass through, break the run
      out += text[i];
      ++i;
      run.clear();
      continue;
    }
    const auto it = to_roman_.find(cp);
    if (it == to_roman_.end()) {
      out.append(text.substr(i, len));
      i += len;
      run.clear();
      continue;
    }
    const std::string& unit = entries_[it->second].roman;
    std::size_t j = out.size();
    out += unit;
    bool safe = true;
    for (auto rit = run.rbegin(); rit != run.rend(); ++rit) {
      if (rit->first + max_roman_len_ <= j) break;
      char32_t dummy;
      if (longest_match(out, rit->first, dummy) != rit->second) {
        safe = false;
        break;
      }
    }
    if (!safe) {
      out.resize(j);
      out += kSeparator;
      j = out.size();
      out += unit;
      run.clear();
    }
    run.emplace_back(j, unit.size());
    i += len;
  }
  return out;
}

std::string TranslitTable::deromanize(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  bool prev_was_unit = false;
  while (i < text.size()) {
    char32_t cp = 0;
    const std::size_t matched = longest_match(text, i, cp);
    if (matched > 0) {
      utf8::append(out, cp);
      i += matched;
      prev_was_unit = true;
      continue;
    }
    if (text[i] == kSeparator && prev_was_unit) {
      char32_t next_cp = 0;
      if (longest_match(text, i + 1, next_cp) > 0) {  // junction separator
        ++i;
        continue;
      }
    }
    const std::size_t len = utf8::decode(text, i, cp);
    const std::size_t step = len == 0 ? 1 : len;
    out.append(text.substr(i, step));
    i += step;
    prev_was_unit = false;
  }
  return out;
}

}  // namespace iumix
