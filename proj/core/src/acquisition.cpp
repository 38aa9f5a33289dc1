#include "culturescope/acquisition.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "culturescope/digest.hpp"
#include "culturescope/jsonl.hpp"
#include "culturescope/prompts.hpp"
#include "culturescope/text.hpp"

namespace culturescope {

void to_json(nlohmann::json& j, const RawDocument& d) {
  j = nlohmann::json{{"doc_id", d.doc_id},
                     {"url", d.url},
                     {"title", d.title},
                     {"body_text", d.body_text},
                     {"dimension_id", d.dimension_id},
                     {"culture", d.culture},
                     {"language", d.language},
                     {"source_category", to_string(d.source_category)},
                     {"fetched_at", d.fetched_at}};
  j["search_rank"] = d.search_rank ? nlohmann::json(*d.search_rank) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RawDocument& d) {
  d.doc_id = j.at("doc_id").get<std::string>();
  d.url = j.at("url").get<std::string>();
  d.title = j.value("title", "");
  d.body_text = j.at("body_text").get<std::string>();
  d.dimension_id = j.at("dimension_id").get<std::string>();
  d.culture = j.at("culture").get<std::string>();
  d.language = j.at("language").get<std::string>();
  const auto cat = parse_source_category(j.value("source_category", "OTHER"));
  if (!cat) throw Error(ErrorCode::kParse, "unknown source_category in document " + d.doc_id);
  d.source_category = *cat;
  d.fetched_at = j.value("fetched_at", "");
  if (j.contains("search_rank") && !j["search_rank"].is_null()) d.search_rank = j["search_rank"].get<int>();
}

ParsedUrl parse_url(std::string_view url) {
  const std::string u = text::trim(url);
  const auto sep = u.find("://");
  if (sep == std::string::npos) throw Error(ErrorCode::kParse, "malformed url (no scheme): '" + u + "'");
  ParsedUrl out;
  out.scheme = text::to_lower(u.substr(0, sep));
  if (out.scheme != "http" && out.scheme != "https")
    throw Error(ErrorCode::kParse, "unsupported url scheme '" + out.scheme + "' in '" + u + "'");
  const auto rest = u.substr(sep + 3);
  const auto host_end = rest.find_first_of("/?#");
  std::string authority = rest.substr(0, host_end);
  out.path = host_end == std::string::npos ? "/" : rest.substr(host_end);
  if (const auto at = authority.rfind('@'); at != std::string::npos) authority = authority.substr(at + 1);
  if (const auto colon = authority.find(':'); colon != std::string::npos) {
    const std::string port = authority.substr(colon + 1);
    if (port.empty() || !std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw Error(ErrorCode::kParse, "malformed port in '" + u + "'");
    authority = authority.substr(0, colon);
  }
  out.host = text::to_lower(authority);
  const bool valid_chars = std::all_of(out.host.begin(), out.host.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '.' || c >= 0x80;
  });
  if (out.host.empty() || !valid_chars || out.host.front() == '.' || out.host.back() == '.' ||
      out.host.find("..") != std::string::npos)
    throw Error(ErrorCode::kParse, "malformed host in '" + u + "'");
  return out;
}

// ---------------------------------------------------------------------------

SourceClassifier::SourceClassifier(std::vector<SourceRule> rules) : rules_(std::move(rules)) {}

std::vector<SourceRule> SourceClassifier::default_rules() {
  using K = SourceRule::Kind;
  using C = SourceCategory;
  std::vector<SourceRule> r;
  auto add = [&](K k, std::string p, C c) { r.push_back(SourceRule{k, std::move(p), c}); };
  for (auto h : {"wikipedia.org", "wikiwand.com", "britannica.com", "encyclopedia.com", "baike.baidu.com",
                 "baike.com", "enciclopedia.com", "worldhistory.org", "newworldencyclopedia.org"})
    add(K::kHostSuffix, h, C::kEncyclopedia);
  for (auto h : {".gov", ".mil", "europa.eu", ".gc.ca", "gob.es", ".gob", "gov.cn", "gouv.fr"})
    add(K::kHostSuffix, h, C::kGovernment);
  for (auto h : {".gov.", ".gob.", ".gouv."}) add(K::kHostContains, h, C::kGovernment);
  for (auto h : {"bbc.co.uk", "bbc.com", "cnn.com", "nytimes.com", "theguardian.com", "reuters.com", "elpais.com",
                 "elmundo.es", "abc.es", "rtve.es", "lavanguardia.com", "20minutos.es", "xinhuanet.com",
                 "chinadaily.com.cn", "cgtn.com", "scmp.com", "people.com.cn", "news.cn", "thelocal.es",
                 "euronews.com", "npr.org", "apnews.com"})
    add(K::kHostSuffix, h, C::kMedia);
  for (auto h : {"spain.info", "culturalatlas.sbs.com.au", "lonelyplanet.com", "tripadvisor.com", "tripadvisor.es",
                 "travelchinaguide.com", "chinahighlights.com", "visitspain.com", "rickSteves.com", "timeout.com",
                 "cervantes.es", "cultura.gob.es"})
    add(K::kHostSuffix, text::to_lower(h), C::kTourismCulture);
  for (auto h : {"tourism", "turismo", "travel", "visit", "viaje", "culture", "cultura"})
    add(K::kHostContains, h, C::kTourismCulture);
  for (auto h : {".edu", ".ac.uk", ".ac.cn", ".edu.cn", ".edu.es", "coursera.org", "khanacademy.org", "uned.es",
                 "study.com", "education.com"})
    add(K::kHostSuffix, h, C::kEducation);
  for (auto h : {".edu.", ".ac.", "univ", "school", "university"}) add(K::kHostContains, h, C::kEducation);
  for (auto h : {"reddit.com", "quora.com", "stackexchange.com", "zhihu.com", "tieba.baidu.com", "forocoches.com",
                 "expatforum.com", "tripadvisor.com/showtopic"})
    add(K::kHostSuffix, h, C::kForum);
  for (auto h : {"forum", "foro", "community", "bbs."}) add(K::kHostContains, h, C::kForum);
  for (auto t : {"encyclopedia", "enciclopedia", "wiki", "百科"}) add(K::kTitleKeyword, t, C::kEncyclopedia);
  for (auto t : {"ministry", "ministerio", "government", "gobierno", "official portal", "政府"})
    add(K::kTitleKeyword, t, C::kGovernment);
  for (auto t : {"news", "noticias", "times", "daily", "periódico", "新闻"}) add(K::kTitleKeyword, t, C::kMedia);
  for (auto t : {"travel", "tourism", "turismo", "guide", "visit", "旅游"}) add(K::kTitleKeyword, t, C::kTourismCulture);
  for (auto t : {"university", "universidad", "course", "lesson", "curso", "课程"})
    add(K::kTitleKeyword, t, C::kEducation);
  for (auto t : {"forum", "foro", "discussion", "thread", "论坛"}) add(K::kTitleKeyword, t, C::kForum);
  return r;
}

SourceClassifier SourceClassifier::defaults() { return SourceClassifier(default_rules()); }

SourceClassifier SourceClassifier::from_file(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  std::vector<SourceRule> rules;
  for (const auto& row : doc.at("rules")) {
    SourceRule r;
    const std::string kind = row.at("kind").get<std::string>();
    if (kind == "host_suffix")
      r.kind = SourceRule::Kind::kHostSuffix;
    else if (kind == "host_contains")
      r.kind = SourceRule::Kind::kHostContains;
    else if (kind == "title_keyword")
      r.kind = SourceRule::Kind::kTitleKeyword;
    else
      throw Error(ErrorCode::kParse, path.string() + ": unknown rule kind '" + kind + "'");
    r.pattern = text::to_lower(row.at("pattern").get<std::string>());
    const auto cat = parse_source_category(row.at("category").get<std::string>());
    if (!cat) throw Error(ErrorCode::kParse, path.string() + ": unknown category in rule '" + r.pattern + "'");
    r.category = *cat;
    rules.push_back(std::move(r));
  }
  return SourceClassifier(std::move(rules));
}

SourceCategory SourceClassifier::classify(std::string_view url, std::string_view title) const {
  const ParsedUrl parsed = parse_url(url);
  const std::string host_path = parsed.host + text::to_lower(parsed.path);
  for (const auto& r : rules_) {
    if (r.kind == SourceRule::Kind::kHostSuffix) {
      if (r.pattern.find('/') != std::string::npos) {
        if (host_path.find(r.pattern) != std::string::npos) return r.category;
      } else if (parsed.host == r.pattern || parsed.host.ends_with(r.pattern.front() == '.' ? r.pattern
                                                                                           : "." + r.pattern)) {
        return r.category;
      }
    } else if (r.kind == SourceRule::Kind::kHostContains) {
      if (parsed.host.find(r.pattern) != std::string::npos) return r.category;
    }
  }
  const std::string lower_title = text::to_lower(title);
  const auto title_terms = text::tokenize(title);
  for (const auto& r : rules_) {
    if (r.kind != SourceRule::Kind::kTitleKeyword) continue;
    const bool ascii = std::all_of(r.pattern.begin(), r.pattern.end(), [](unsigned char c) { return c < 0x80; });
    if (ascii && r.pattern.find(' ') == std::string::npos) {
      for (const auto& t : title_terms)
        if (t == r.pattern || (r.pattern == "wiki" && t.starts_with("wiki"))) return r.category;
    } else if (lower_title.find(r.pattern) != std::string::npos) {
      return r.category;
    }
  }
  return SourceCategory::kOther;
}

SourceCategory classify_source(std::string_view url, std::string_view title) {
  static const SourceClassifier kDefault = SourceClassifier::defaults();
  return kDefault.classify(url, title);
}

// ---------------------------------------------------------------------------

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, std::uint32_t, std::less<>> kNamed = {
      {"amp", '&'},     {"lt", '<'},      {"gt", '>'},      {"quot", '"'},    {"apos", '\''},   {"nbsp", ' '},
      {"aacute", 0xE1}, {"eacute", 0xE9}, {"iacute", 0xED}, {"oacute", 0xF3}, {"uacute", 0xFA}, {"ntilde", 0xF1},
      {"Aacute", 0xC1}, {"Eacute", 0xC9}, {"Iacute", 0xCD}, {"Oacute", 0xD3}, {"Uacute", 0xDA}, {"Ntilde", 0xD1},
      {"uuml", 0xFC},   {"iexcl", 0xA1},  {"iquest", 0xBF}, {"ndash", 0x2013}, {"mdash", 0x2014}, {"hellip", 0x2026},
      {"laquo", 0xAB},  {"raquo", 0xBB},  {"rsquo", 0x2019}, {"lsquo", 0x2018}, {"rdquo", 0x201D}, {"ldquo", 0x201C},
      {"copy", 0xA9},   {"deg", 0xB0}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = name.size() > 1;
      const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; k < name.size() && ok; ++k) {
        const char c = name[k];
        if (hex && std::isxdigit(static_cast<unsigned char>(c)))
          cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10));
        else if (!hex && std::isdigit(static_cast<unsigned char>(c)))
          cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
        else
          ok = false;
      }
      if (ok) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (auto it = kNamed.find(name); it != kNamed.end()) {
      append_utf8(out, it->second);
      i = semi;
      continue;
    }
    out.push_back('&');
  }
  return out;
}

bool is_dropped_tag(std::string_view t) {
  static const std::set<std::string, std::less<>> kDrop = {"script", "style",  "nav",    "header",   "footer",
                                                           "noscript", "aside", "form",  "iframe",   "svg",
                                                           "button", "select", "template", "head"};
  return kDrop.count(t) > 0;
}

bool is_kept_block(std::string_view t) {
  static const std::set<std::string, std::less<>> kKeep = {"h1", "h2", "h3", "h4", "h5", "h6", "p", "li",
                                                           "blockquote", "dd", "dt", "figcaption", "pre"};
  return kKeep.count(t) > 0;
}

bool is_break_tag(std::string_view t) {
  static const std::set<std::string, std::less<>> kBreak = {"br", "div", "tr", "ul", "ol", "section", "article",
                                                            "main", "table", "td", "th", "hr", "body"};
  return kBreak.count(t) > 0 || is_kept_block(t);
}

std::string tidy_lines(const std::string& raw) {
  std::vector<std::string> lines;
  for (const auto& line : text::split_lines(raw)) {
    auto t = text::collapse_whitespace(line);
    if (!t.empty()) lines.push_back(std::move(t));
  }
  return text::join(lines, "\n");
}

}  // namespace

CleanedPage clean_html(std::string_view html, std::size_t char_budget) {
  std::string structured, visible, title;
  int drop_depth = 0, keep_depth = 0;
  bool in_title = false;
  std::size_t i = 0;
  auto emit = [&](std::string_view chunk) {
    const std::string decoded = decode_entities(chunk);
    if (in_title) title += decoded;
    if (drop_depth > 0) return;
    visible += decoded;
    if (keep_depth > 0) structured += decoded;
  };
  while (i < html.size()) {
    if (html[i] != '<') {
      const auto next = html.find('<', i);
      emit(html.substr(i, next == std::string_view::npos ? std::string_view::npos : next - i));
      if (next == std::string_view::npos) break;
      i = next;
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    const auto close = html.find('>', i);
    if (close == std::string_view::npos) {
      emit(html.substr(i));
      break;
    }
    std::string_view tag = html.substr(i + 1, close - i - 1);
    i = close + 1;
    bool closing = false;
    if (!tag.empty() && tag[0] == '/') {
      closing = true;
      tag.remove_prefix(1);
    }
    if (!tag.empty() && (tag[0] == '!' || tag[0] == '?')) continue;
    std::size_t name_end = 0;
    while (name_end < tag.size() && std::isalnum(static_cast<unsigned char>(tag[name_end]))) ++name_end;
    const std::string name = text::to_lower(tag.substr(0, name_end));
    const bool self_closing = !tag.empty() && tag.back() == '/';
    if (name.empty()) continue;

    if (name == "title") {
      in_title = !closing;
      continue;
    }
    if ((name == "script" || name == "style") && !closing) {
      // Raw text element: skip to its end tag.
      const std::string end_tag = "</" + name;
      std::size_t pos = i;
      while (true) {
        pos = html.find('<', pos);
        if (pos == std::string_view::npos || text::starts_with_ci(html.substr(pos), end_tag)) break;
        ++pos;
      }
      if (pos == std::string_view::npos) {
        i = html.size();
      } else {
        const auto gt = html.find('>', pos);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      continue;
    }
    if (is_dropped_tag(name) && !self_closing) {
      drop_depth = std::max(0, drop_depth + (closing ? -1 : 1));
      continue;
    }
    if (is_kept_block(name) && !self_closing) keep_depth = std::max(0, keep_depth + (closing ? -1 : 1));
    if (is_break_tag(name) && drop_depth == 0) {
      visible.push_back('\n');
      structured.push_back('\n');
    }
  }
  CleanedPage page;
  page.title = text::collapse_whitespace(title);
  std::string body = tidy_lines(structured);
  if (body.empty()) body = tidy_lines(visible);
  page.text = text::utf8_truncate(body, char_budget);
  return page;
}

// ---------------------------------------------------------------------------

FixtureFetcher::FixtureFetcher(std::map<std::string, std::string> pages, CallLog* log)
    : pages_(std::move(pages)), log_(log) {}

FixtureFetcher FixtureFetcher::from_file(const std::filesystem::path& path, CallLog* log) {
  const Json doc = read_json_file(path);
  std::map<std::string, std::string> pages;
  for (const auto& [url, html] : doc.at("pages").items()) pages[url] = html.get<std::string>();
  return FixtureFetcher(std::move(pages), log);
}

FetchResult FixtureFetcher::fetch(const std::string& url) {
  auto it = pages_.find(url);
  if (log_) log_->record({"mock-fetch", "fetch", short_digest({url}), 0.0, it == pages_.end() ? "not_found" : "ok"});
  if (it == pages_.end()) return {std::nullopt, "no fixture page for " + url};
  return {it->second, ""};
}

LiveFetcher::LiveFetcher(std::shared_ptr<HttpTransport> transport, Clock& clock, Millis per_host_delay, CallLog* log,
                         double timeout_seconds)
    : transport_(std::move(transport)),
      clock_(clock),
      per_host_delay_(per_host_delay),
      log_(log),
      timeout_seconds_(timeout_seconds) {}

FetchResult LiveFetcher::fetch(const std::string& url) {
  std::string host;
  try {
    host = parse_url(url).host;
  } catch (const Error& e) {
    return {std::nullopt, e.what()};
  }
  {
    std::lock_guard lock(mu_);
    auto it = last_fetch_.find(host);
    const Millis now = clock_.now();
    if (it != last_fetch_.end() && now - it->second < per_host_delay_) clock_.sleep_for(it->second + per_host_delay_ - now);
    last_fetch_[host] = clock_.now();
  }
  const Millis start = clock_.now();
  try {
    const auto resp = transport_->send(HttpRequest{"GET", url, {{"Accept", "text/html"}}, "", timeout_seconds_});
    if (log_)
      log_->record({"live-fetch", "fetch", short_digest({url}), static_cast<double>((clock_.now() - start).count()),
                    resp.status >= 200 && resp.status < 300 ? "ok" : "http_" + std::to_string(resp.status)});
    if (resp.status < 200 || resp.status >= 300) return {std::nullopt, "HTTP " + std::to_string(resp.status) + " for " + url};
    return {resp.body, ""};
  } catch (const Error& e) {
    if (log_)
      log_->record({"live-fetch", "fetch", short_digest({url}), static_cast<double>((clock_.now() - start).count()),
                    std::string(to_string(e.code()))});
    return {std::nullopt, e.what()};
  }
}

// ---------------------------------------------------------------------------

std::vector<QuerySpec> plan_retrieval(const Schema& schema, std::string_view culture, std::string_view language,
                                      const PlanOptions& options) {
  if (text::trim(culture).empty()) throw Error(ErrorCode::kPrecondition, "culture must be nonempty");
  const std::string tmpl = options.query_template.empty() ? default_query_template(language) : options.query_template;
  std::vector<QuerySpec> specs;
  for (const auto& dim : leaf_dimensions(schema)) {
    specs.push_back(build_query(dim, culture, language, tmpl));
    if (!options.include_sub_dimensions) continue;
    std::vector<DimensionNode> subs;
    for (const auto* c : schema.children(dim.node_id))
      if (c->level == Level::kSubDimension) subs.push_back(*c);
    std::sort(subs.begin(), subs.end(), [](const auto& a, const auto& b) {
      return std::pair(text::to_lower(a.name), a.node_id) < std::pair(text::to_lower(b.name), b.node_id);
    });
    for (const auto& s : subs) specs.push_back(build_query(s, culture, language, tmpl));
  }
  return specs;
}

std::vector<SeedUrl> parse_seed_urls(std::string_view content) {
  std::vector<SeedUrl> seeds;
  for (const auto& raw : text::split_lines(content)) {
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos && (hash == 0 || std::isspace(static_cast<unsigned char>(line[hash - 1]))))
      line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto ws = line.find_first_of(" \t");
    SeedUrl s;
    s.url = line.substr(0, ws);
    (void)parse_url(s.url);
    if (ws != std::string::npos) {
      const std::string dim = text::trim(std::string_view(line).substr(ws));
      if (!dim.empty()) s.dimension_id = dim;
    }
    seeds.push_back(std::move(s));
  }
  return seeds;
}

std::vector<SeedUrl> load_seed_urls(const std::filesystem::path& path) { return parse_seed_urls(read_text_file(path)); }

FetchOutcome fetch_documents(const QuerySpec& spec, SearchProvider* search, Fetcher& fetcher,
                             const std::vector<SeedUrl>& seeds, const SourceClassifier& classifier, Clock& clock,
                             const FetchOptions& options) {
  if (spec.query_text.empty() || spec.dimension_id.empty())
    throw Error(ErrorCode::kPrecondition, "fetch_documents requires a complete QuerySpec");
  struct Candidate {
    std::string url;
    std::string title;
    std::optional<int> rank;
  };
  std::vector<Candidate> candidates;
  std::set<std::string> seen;
  for (const auto& s : seeds) {
    if (s.dimension_id && *s.dimension_id != spec.dimension_id) continue;
    if (seen.insert(s.url).second) candidates.push_back({s.url, "", std::nullopt});
  }
  if (search) {
    for (const auto& r : search->search(spec, options.top_k))
      if (seen.insert(r.url).second) candidates.push_back({r.url, r.title, r.rank});
  }
  if (static_cast<int>(candidates.size()) > options.top_k) candidates.resize(static_cast<std::size_t>(options.top_k));

  FetchOutcome out;
  for (const auto& c : candidates) {
    SourceCategory category;
    try {
      (void)parse_url(c.url);
    } catch (const Error& e) {
      out.warnings.push_back(std::string("skipped: ") + e.what());
      continue;
    }
    const FetchResult fetched = fetcher.fetch(c.url);
    if (!fetched.html) {
      out.warnings.push_back("fetch failed: " + fetched.error);
      continue;
    }
    const CleanedPage page = clean_html(*fetched.html, options.char_budget);
    if (text::trim(page.text).empty()) {
      out.warnings.push_back("empty body after cleaning: " + c.url);
      continue;
    }
    RawDocument doc;
    doc.url = c.url;
    doc.title = page.title.empty() ? c.title : page.title;
    category = classifier.classify(c.url, doc.title);
    doc.body_text = page.text;
    doc.dimension_id = spec.dimension_id;
    doc.culture = spec.culture;
    doc.language = spec.language;
    doc.source_category = category;
    doc.fetched_at = clock.timestamp();
    doc.search_rank = c.rank;
    doc.doc_id = short_digest({doc.url, doc.fetched_at.substr(0, 10), doc.dimension_id});
    out.documents.push_back(std::move(doc));
  }
  if (out.documents.empty() && !candidates.empty())
    out.warnings.push_back("all candidate URLs failed for query '" + spec.query_text + "'");
  return out;
}

FilterVerdict llm_filter(const RawDocument& doc, std::string_view dimension_name, ChatProvider& chat) {
  if (text::trim(doc.body_text).empty()) throw Error(ErrorCode::kPrecondition, "llm_filter: document body is empty");
  static const std::vector<std::string> kTokens = {"ACCEPT", "OFF_TOPIC", "BOILERPLATE", "WRONG_CULTURE"};
  ChatRequest req;
  req.user_text = prompts::filter_prompt(doc.culture, dimension_name, doc.title, doc.body_text);
  req.language = doc.language;
  req.max_output_tokens = 128;
  req.temperature = 0.0;
  req.task = LlmTask::kFilter;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ChatResponse resp = chat.chat(req);
    if (const auto token = prompts::parse_verdict_token(resp.text, kTokens)) {
      FilterVerdict v;
      v.decision = *token == "ACCEPT" ? FilterDecision::kAccepted : FilterDecision::kRejected;
      v.reason = *token;
      v.rationale = prompts::rationale_after_verdict(resp.text);
      return v;
    }
  }
  return FilterVerdict{FilterDecision::kRejected, "UNDECIDED", "verdict could not be parsed after one retry"};
}

}  // namespace culturescope
