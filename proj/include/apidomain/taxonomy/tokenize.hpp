#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/text.hpp"

namespace apidomain {

enum class TokenPosition { first, second, full_namespace };

NLOHMANN_JSON_SERIALIZE_ENUM(TokenPosition, {{TokenPosition::first, "first"},
                                             {TokenPosition::second, "second"},
                                             {TokenPosition::full_namespace, "full_namespace"}})

inline std::string_view to_string(TokenPosition p) {
  switch (p) {
    case TokenPosition::first: return "first";
    case TokenPosition::second: return "second";
    case TokenPosition::full_namespace: return "full_namespace";
  }
  return "?";
}

inline TokenPosition parse_position(std::string_view s) {
  const auto t = text::to_lower_ascii(text::trim(s));
  if (t == "first" || t == "1") return TokenPosition::first;
  if (t == "second" || t == "2") return TokenPosition::second;
  if (t == "full_namespace" || t == "full" || t == "namespace") return TokenPosition::full_namespace;
  throw std::invalid_argument("unknown token position '" + std::string(s) + "'");
}

struct NamespaceToken {
  TokenPosition position;
  std::string token;

  friend bool operator==(const NamespaceToken&, const NamespaceToken&) = default;
};

/// Generic TLDs, ISO-3166 alpha-2 codes, and a few vendor names.
inline std::set<std::string> default_blocklist() {
  std::set<std::string> out = {"com", "org", "net", "io", "edu", "gov",
                               "microsoft", "google", "facebook"};
  static constexpr std::string_view iso3166 =
      "ad ae af ag ai al am ao aq ar as at au aw ax az ba bb bd be bf bg bh bi bj bl bm bn bo bq "
      "br bs bt bv bw by bz ca cc cd cf cg ch ci ck cl cm cn co cr cu cv cw cx cy cz de dj dk dm "
      "do dz ec ee eg eh er es et fi fj fk fm fo fr ga gb gd ge gf gg gh gi gl gm gn gp gq gr gs "
      "gt gu gw gy hk hm hn hr ht hu id ie il im in io iq ir is it je jm jo jp ke kg kh ki km kn "
      "kp kr kw ky kz la lb lc li lk lr ls lt lu lv ly ma mc md me mf mg mh mk ml mm mn mo mp mq "
      "mr ms mt mu mv mw mx my mz na nc ne nf ng ni nl no np nr nu nz om pa pe pf pg ph pk pl pm "
      "pn pr ps pt pw py qa re ro rs ru rw sa sb sc sd se sg sh si sj sk sl sm sn so sr ss st sv "
      "sx sy sz tc td tf tg th tj tk tl tm tn to tr tt tv tw tz ua ug um us uy uz va vc ve vg vi "
      "vn vu wf ws ye yt za zm zw uk";
  for (auto& code : text::split_whitespace(iso3166)) out.insert(code);
  return out;
}

inline const std::set<std::string>& builtin_blocklist() {
  static const std::set<std::string> list = default_blocklist();
  return list;
}

/// Splits a namespace on '.', '/' and "::", lowercases, drops blocked
/// tokens, and tags the first two survivors. The full namespace is always
/// emitted last, unchanged.
inline std::vector<NamespaceToken> tokenize_namespace(std::string_view ns,
                                                      const std::set<std::string>& blocklist) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(text::to_lower_ascii(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const char c = ns[i];
    if (c == '.' || c == '/' || c == '\\') {
      flush();
    } else if (c == ':' && i + 1 < ns.size() && ns[i + 1] == ':') {
      flush();
      ++i;
    } else {
      cur.push_back(c);
    }
  }
  flush();
  std::vector<NamespaceToken> out;
  for (const auto& p : parts) {
    if (blocklist.count(p)) continue;
    if (out.empty()) out.push_back({TokenPosition::first, p});
    else if (out.size() == 1) out.push_back({TokenPosition::second, p});
    else break;
  }
  out.push_back({TokenPosition::full_namespace, std::string(text::trim(ns))});
  return out;
}

}  // namespace apidomain
