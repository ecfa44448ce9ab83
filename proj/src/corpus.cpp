#include "riasec/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "tsv.hpp"

namespace riasec {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

// Reads six score cells. All empty means unlabeled; anything else must be a
// complete, in-range profile.
std::optional<RiasecProfile> parse_scores(const std::vector<std::string_view>& cells,
                                          std::size_t first, const std::string& at) {
  int empty = 0;
  for (int d = 0; d < kDims; ++d) {
    if (detail::trim(cells[first + d]).empty()) ++empty;
  }
  if (empty == kDims) return std::nullopt;
  if (empty != 0) throw ValidationError(at + "partial profile (some score cells empty)");

  RiasecProfile y;
  for (int d = 0; d < kDims; ++d) {
    double v = 0.0;
    if (!detail::parse_double(cells[first + d], v) || !std::isfinite(v)) {
      throw ValidationError(at + "bad score '" + std::string(cells[first + d]) + "' for " +
                            dim_letter(static_cast<Dim>(d)));
    }
    if (v < kMinScore || v > kMaxScore) {
      throw ValidationError(at + "score " + std::string(detail::trim(cells[first + d])) +
                            " for " + dim_letter(static_cast<Dim>(d)) +
                            " outside [0,100]");
    }
    y[d] = v;
  }
  return y;
}

std::string format_score(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string format_profile(const RiasecProfile& y) {
  std::ostringstream os;
  os << '(';
  for (int d = 0; d < kDims; ++d) os << (d ? "," : "") << y[d];
  os << ')';
  return os.str();
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s.push_back(' ');
    s += tokens[i];
  }
  return s;
}

OccupationSet labeled_subset(const OccupationSet& occs) {
  OccupationSet out;
  for (const auto& o : occs) {
    if (!o.profile) continue;
    Occupation copy = o;
    std::erase_if(copy.similar_ids, [&](const std::string& id) {
      const Occupation* other = occs.find(id);
      return other == nullptr || !other->profile;
    });
    out.add(std::move(copy));
  }
  return out;
}

OccupationSet read_occupations(std::istream& in, const std::string& source) {
  constexpr std::size_t kColumns = 10;
  OccupationSet occs;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty file (missing header)");
  ++line_no;

  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    const std::string at = detail::where(source, line_no);
    auto cells = detail::split(line, '\t');
    if (cells.size() != kColumns) {
      throw ValidationError(at + "expected " + std::to_string(kColumns) + " columns, found " +
                            std::to_string(cells.size()));
    }
    Occupation o;
    o.id = std::string(detail::trim(cells[0]));
    if (o.id.empty()) throw ValidationError(at + "empty occupation id");
    o.title_tokens = tokenize(cells[1]);
    o.desc_tokens = tokenize(cells[2]);
    o.profile = parse_scores(cells, 3, at);
    std::set<std::string> similar;
    for (auto s : detail::split(cells[9], ';')) {
      auto id = detail::trim(s);
      if (!id.empty()) similar.emplace(id);
    }
    o.similar_ids.assign(similar.begin(), similar.end());
    try {
      occs.add(std::move(o));
    } catch (const ValidationError& e) {
      throw ValidationError(at + e.what());
    }
  }

  std::vector<std::string> dangling;
  for (const auto& o : occs) {
    for (const auto& s : o.similar_ids) {
      if (!occs.contains(s)) dangling.push_back(o.id + "->" + s);
    }
  }
  if (!dangling.empty()) {
    std::string msg = source + ": similar_ids reference unknown occupations:";
    for (const auto& d : dangling) msg += " " + d;
    throw ValidationError(msg);
  }
  return occs;
}

OccupationSet load_occupations(const std::string& path) {
  auto in = detail::open_input(path);
  return read_occupations(in, path);
}

void write_occupations(std::ostream& out, const OccupationSet& occs) {
  out << "id\ttitle\tdescription\tR\tI\tA\tS\tE\tC\tsimilar_ids\n";
  for (const auto& o : occs) {
    out << o.id << '\t' << join_tokens(o.title_tokens) << '\t' << join_tokens(o.desc_tokens);
    for (int d = 0; d < kDims; ++d) {
      out << '\t';
      if (o.profile) out << format_score((*o.profile)[d]);
    }
    out << '\t';
    for (std::size_t i = 0; i < o.similar_ids.size(); ++i) {
      out << (i ? ";" : "") << o.similar_ids[i];
    }
    out << '\n';
  }
}

JobSet read_jobs(std::istream& in, const std::string& source) {
  JobSet jobs;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ValidationError(source + ": empty file (missing header)");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    const std::string at = detail::where(source, line_no);
    auto cells = detail::split(line, '\t');
    if (cells.size() != 4) {
      throw ValidationError(at + "expected 4 columns, found " + std::to_string(cells.size()));
    }
    JobPost j;
    j.id = std::string(detail::trim(cells[0]));
    if (j.id.empty()) throw ValidationError(at + "empty job id");
    j.title_tokens = tokenize(cells[1]);
    j.desc_tokens = tokenize(cells[2]);
    if (j.title_tokens.empty() && j.desc_tokens.empty()) {
      throw ValidationError(at + "job '" + j.id + "' has neither title nor description tokens");
    }
    auto code = detail::trim(cells[3]);
    if (!code.empty()) j.taxonomy_code = std::string(code);
    try {
      jobs.add(std::move(j));
    } catch (const ValidationError& e) {
      throw ValidationError(at + e.what());
    }
  }
  return jobs;
}

JobSet load_jobs(const std::string& path) {
  auto in = detail::open_input(path);
  return read_jobs(in, path);
}

Vocabulary select_discriminative_words(const OccupationSet& occs, double max_ndf) {
  if (occs.empty()) throw ValidationError("cannot select words from an empty occupation set");
  if (!(max_ndf >= 0.0 && max_ndf <= 1.0)) {
    throw ValidationError("max_ndf must lie in [0,1], got " + std::to_string(max_ndf));
  }
  std::map<std::string, int> df;
  for (const auto& o : occs) {
    std::set<std::string> seen(o.title_tokens.begin(), o.title_tokens.end());
    seen.insert(o.desc_tokens.begin(), o.desc_tokens.end());
    for (const auto& w : seen) ++df[w];
  }
  const double n = static_cast<double>(occs.size());
  Vocabulary vocab;
  for (const auto& [w, count] : df) {
    if (count / n < max_ndf) vocab.doc_freq.emplace(w, count);
  }
  return vocab;
}

void Crosswalk::add(const std::string& source, const std::string& target) {
  auto& targets = mapping_[source];
  auto it = std::lower_bound(targets.begin(), targets.end(), target);
  if (it == targets.end() || *it != target) targets.insert(it, target);
}

const std::vector<std::string>* Crosswalk::targets(const std::string& source) const {
  auto it = mapping_.find(source);
  return it == mapping_.end() ? nullptr : &it->second;
}

std::size_t Crosswalk::pair_count() const {
  std::size_t n = 0;
  for (const auto& [s, t] : mapping_) n += t.size();
  return n;
}

Crosswalk read_crosswalk(std::istream& in, const std::string& source) {
  Crosswalk cw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, '\t');
    if (cells.size() != 2) {
      throw ValidationError(detail::where(source, line_no) + "expected 2 columns, found " +
                            std::to_string(cells.size()));
    }
    auto s = detail::trim(cells[0]);
    auto t = detail::trim(cells[1]);
    if (s.empty() || t.empty()) {
      throw ValidationError(detail::where(source, line_no) + "empty code");
    }
    cw.add(std::string(s), std::string(t));
  }
  return cw;
}

Crosswalk load_crosswalk(const std::string& path) {
  auto in = detail::open_input(path);
  return read_crosswalk(in, path);
}

ProfileTable read_target_profiles(std::istream& in, const std::string& source) {
  ProfileTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    const std::string at = detail::where(source, line_no);
    auto cells = detail::split(line, '\t');
    if (cells.size() != 1 + kDims) {
      throw ValidationError(at + "expected 7 columns, found " + std::to_string(cells.size()));
    }
    auto profile = parse_scores(cells, 1, at);
    if (!profile) throw ValidationError(at + "missing scores");
    std::string code(detail::trim(cells[0]));
    if (!table.emplace(code, *profile).second) {
      throw ValidationError(at + "duplicate code '" + code + "'");
    }
  }
  return table;
}

ProfileTable load_target_profiles(const std::string& path) {
  auto in = detail::open_input(path);
  return read_target_profiles(in, path);
}

RiasecProfile derive_weak_profile(const std::string& code, const CrosswalkChain& chain,
                                  const ProfileTable& target_profiles) {
  if (chain.empty()) throw ValidationError("crosswalk chain must not be empty");
  std::set<std::string> frontier{code};
  for (const auto& cw : chain) {
    std::set<std::string> next;
    for (const auto& c : frontier) {
      if (const auto* t = cw.targets(c)) next.insert(t->begin(), t->end());
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }

  RiasecProfile sum = RiasecProfile::Zero();
  int found = 0;
  for (const auto& c : frontier) {
    auto it = target_profiles.find(c);
    if (it == target_profiles.end()) continue;
    sum += it->second;
    ++found;
  }
  if (found == 0) throw UnmappedError("code '" + code + "' is unmapped");
  return sum / found;
}

WeakLabeling weak_label_jobs(const JobSet& jobs, const CrosswalkChain& chain,
                             const ProfileTable& target_profiles) {
  if (chain.empty()) throw ValidationError("crosswalk chain must not be empty");
  WeakLabeling result;
  for (const auto& j : jobs) {
    JobPost copy = j;
    copy.weak_profile.reset();
    if (copy.taxonomy_code) {
      try {
        copy.weak_profile = derive_weak_profile(*copy.taxonomy_code, chain, target_profiles);
        ++result.labeled;
      } catch (const UnmappedError&) {
      }
    }
    result.jobs.add(std::move(copy));
  }
  result.coverage =
      jobs.empty() ? 1.0 : static_cast<double>(result.labeled) / static_cast<double>(jobs.size());
  return result;
}

}  // namespace riasec
