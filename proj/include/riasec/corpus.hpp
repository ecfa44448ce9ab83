#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "riasec/profile.hpp"

namespace riasec {

using Tokens = std::vector<std::string>;

/// Lowercases ASCII letters and splits on runs of non-alphanumeric bytes.
/// Bytes >= 0x80 are kept inside tokens so UTF-8 words survive intact.
Tokens tokenize(std::string_view text);

std::string join_tokens(const Tokens& tokens);

struct Occupation {
  std::string id;
  Tokens title_tokens;
  Tokens desc_tokens;
  std::vector<std::string> similar_ids;  // sorted, unique
  std::optional<RiasecProfile> profile;

  bool operator==(const Occupation&) const = default;
};

struct JobPost {
  std::string id;
  Tokens title_tokens;
  Tokens desc_tokens;
  std::optional<std::string> taxonomy_code;
  std::optional<RiasecProfile> weak_profile;

  bool operator==(const JobPost&) const = default;
};

/// Insertion-ordered collection with unique string ids.
template <typename Item>
class IndexedSet {
 public:
  IndexedSet() = default;

  /// Throws ValidationError when the id is already present.
  void add(Item item) {
    auto [it, inserted] = index_.emplace(item.id, items_.size());
    if (!inserted) throw ValidationError("duplicate id '" + item.id + "'");
    items_.push_back(std::move(item));
  }

  const Item* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &items_[it->second];
  }
  bool contains(std::string_view id) const { return find(id) != nullptr; }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const Item& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Item>& items() const { return items_; }

  bool operator==(const IndexedSet& other) const { return items_ == other.items_; }

 private:
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

using OccupationSet = IndexedSet<Occupation>;
using JobSet = IndexedSet<JobPost>;

/// Occupations that carry a profile, with similarity links to unlabeled
/// occupations removed.
OccupationSet labeled_subset(const OccupationSet& occs);

/// Parses the occupations TSV. `source` names the stream in error messages.
OccupationSet read_occupations(std::istream& in, const std::string& source);
OccupationSet load_occupations(const std::string& path);
void write_occupations(std::ostream& out, const OccupationSet& occs);

JobSet read_jobs(std::istream& in, const std::string& source);
JobSet load_jobs(const std::string& path);

/// Discriminative words with the number of occupations containing each.
struct Vocabulary {
  std::map<std::string, int> doc_freq;

  bool contains(const std::string& w) const { return doc_freq.count(w) != 0; }
  std::size_t size() const { return doc_freq.size(); }
};

/// Words whose occupation document frequency divided by the number of
/// occupations is strictly below `max_ndf`.
Vocabulary select_discriminative_words(const OccupationSet& occs, double max_ndf = 0.10);

/// Many-to-many code mapping. Duplicate pairs collapse to one.
class Crosswalk {
 public:
  void add(const std::string& source, const std::string& target);
  const std::vector<std::string>* targets(const std::string& source) const;
  std::size_t pair_count() const;

 private:
  std::map<std::string, std::vector<std::string>> mapping_;  // targets sorted
};

using CrosswalkChain = std::vector<Crosswalk>;
using ProfileTable = std::map<std::string, RiasecProfile>;

Crosswalk read_crosswalk(std::istream& in, const std::string& source);
Crosswalk load_crosswalk(const std::string& path);
ProfileTable read_target_profiles(std::istream& in, const std::string& source);
ProfileTable load_target_profiles(const std::string& path);

/// Raised when a taxonomy code cannot be turned into a profile.
class UnmappedError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

/// Follows the chain from `code` and averages the profiles of the distinct
/// terminal codes that have one.
RiasecProfile derive_weak_profile(const std::string& code, const CrosswalkChain& chain,
                                  const ProfileTable& target_profiles);

struct WeakLabeling {
  JobSet jobs;
  double coverage = 1.0;  // labeled / total; 1.0 for an empty set
  std::size_t labeled = 0;
};

WeakLabeling weak_label_jobs(const JobSet& jobs, const CrosswalkChain& chain,
                             const ProfileTable& target_profiles);

}  // namespace riasec
