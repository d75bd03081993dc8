#include "crowd/label_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

// Builds a CSR layout of `count` buckets from (bucket, member, entry) keys
// sorted by bucket then member.
struct Keyed {
  int bucket;
  int member;
  int entry;
};

void fill_csr(std::vector<Keyed>& keys, int count, std::vector<int>& offsets,
              std::vector<int>* entries, std::vector<int>& members) {
  std::sort(keys.begin(), keys.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.bucket, a.member) < std::tie(b.bucket, b.member);
  });
  offsets.assign(static_cast<std::size_t>(count) + 1, 0);
  for (const auto& k : keys) ++offsets[static_cast<std::size_t>(k.bucket) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  members.clear();
  members.reserve(keys.size());
  if (entries) {
    entries->clear();
    entries->reserve(keys.size());
  }
  for (const auto& k : keys) {
    members.push_back(k.member);
    if (entries) entries->push_back(k.entry);
  }
}

std::span<const int> bucket(const std::vector<int>& offsets, const std::vector<int>& data,
                            std::size_t b) {
  if (b + 1 >= offsets.size()) throw std::out_of_range("index set bucket out of range");
  return std::span<const int>(data).subspan(static_cast<std::size_t>(offsets[b]),
                                            static_cast<std::size_t>(offsets[b + 1] - offsets[b]));
}

}  // namespace

LabelSpace::LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw InputError("label space needs at least 2 labels");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw InputError("empty label name");
    if (!index_.emplace(names_[i], static_cast<int>(i) + 1).second) {
      throw InputError("duplicate label name '" + names_[i] + "'");
    }
  }
}

LabelSpace LabelSpace::ordinal(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(std::to_string(i));
  return LabelSpace(std::move(names));
}

bool LabelSpace::contains(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

int LabelSpace::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw InputError("unknown label '" + std::string(name) + "'");
  return it->second;
}

const std::string& LabelSpace::name_of(int label) const {
  if (label < 1 || label > size()) {
    throw InputError("label index " + std::to_string(label) + " outside 1.." + std::to_string(size()));
  }
  return names_[static_cast<std::size_t>(label - 1)];
}

int label_to_index(const LabelSpace& space, std::string_view name) { return space.index_of(name); }

const std::string& index_to_label(const LabelSpace& space, int label) { return space.name_of(label); }

bool is_simplex(std::span<const double> p, double tol) {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

void check_simplex(std::span<const double> p, double tol, const std::string& what) {
  if (!is_simplex(p, tol)) throw ValidationError(what + " is not a probability vector");
}

void check_profile(const AnnotatorProfile& profile, int n_labels) {
  if (!(profile.epsilon >= 0.0 && profile.epsilon <= 1.0)) {
    throw ValidationError("annotator reliability outside [0,1]");
  }
  if (static_cast<int>(profile.pi.size()) != n_labels) {
    throw ValidationError("irregular-behavior vector has wrong length");
  }
  check_simplex(profile.pi, kSimplexTolerance, "irregular-behavior vector");
}

AnnotationSet::AnnotationSet(std::vector<Annotation> annotations, int n_labels,
                             std::vector<std::string> object_names,
                             std::vector<std::string> annotator_names)
    : n_labels_(n_labels),
      annotations_(std::move(annotations)),
      object_names_(std::move(object_names)),
      annotator_names_(std::move(annotator_names)) {
  if (n_labels_ < 2) throw InputError("label space needs at least 2 labels");
  const int n_obj = n_objects();
  const int n_ann = n_annotators();

  std::vector<Keyed> by_object, by_annotator, by_object_label, by_annotator_label;
  by_object.reserve(annotations_.size());
  by_annotator.reserve(annotations_.size());
  by_object_label.reserve(annotations_.size());
  by_annotator_label.reserve(annotations_.size());

  std::unordered_set<long long> seen;
  seen.reserve(annotations_.size() * 2);
  for (std::size_t i = 0; i < annotations_.size(); ++i) {
    const auto& a = annotations_[i];
    if (a.object < 0 || a.object >= n_obj) throw InputError("annotation object id out of range");
    if (a.annotator < 0 || a.annotator >= n_ann) throw InputError("annotation annotator id out of range");
    if (a.label < 1 || a.label > n_labels_) {
      throw InputError("annotation label " + std::to_string(a.label) + " outside 1.." +
                       std::to_string(n_labels_));
    }
    const long long key = static_cast<long long>(a.object) * n_ann + a.annotator;
    if (!seen.insert(key).second) {
      throw DuplicateAnnotationError("object '" + object_names_[static_cast<std::size_t>(a.object)] +
                                     "' labeled twice by annotator '" +
                                     annotator_names_[static_cast<std::size_t>(a.annotator)] + "'");
    }
    const int entry = static_cast<int>(i);
    by_object.push_back({a.object, a.annotator, entry});
    by_annotator.push_back({a.annotator, a.object, entry});
    by_object_label.push_back({a.object * n_labels_ + (a.label - 1), a.annotator, entry});
    by_annotator_label.push_back({a.annotator * n_labels_ + (a.label - 1), a.object, entry});
  }

  fill_csr(by_object, n_obj, object_offsets_, &object_entries_, object_members_);
  fill_csr(by_annotator, n_ann, annotator_offsets_, &annotator_entries_, annotator_members_);
  fill_csr(by_object_label, n_obj * n_labels_, object_label_offsets_, nullptr, object_label_members_);
  fill_csr(by_annotator_label, n_ann * n_labels_, annotator_label_offsets_, nullptr,
           annotator_label_members_);
}

std::span<const int> AnnotationSet::object_entries(int e) const {
  return bucket(object_offsets_, object_entries_, static_cast<std::size_t>(e));
}

std::span<const int> AnnotationSet::annotator_entries(int s) const {
  return bucket(annotator_offsets_, annotator_entries_, static_cast<std::size_t>(s));
}

std::span<const int> AnnotationSet::annotators_of(int e) const {
  return bucket(object_offsets_, object_members_, static_cast<std::size_t>(e));
}

std::span<const int> AnnotationSet::objects_of(int s) const {
  return bucket(annotator_offsets_, annotator_members_, static_cast<std::size_t>(s));
}

std::span<const int> AnnotationSet::annotators_with(int e, int label) const {
  if (label < 1 || label > n_labels_) throw std::out_of_range("label out of range");
  return bucket(object_label_offsets_, object_label_members_,
                static_cast<std::size_t>(e * n_labels_ + label - 1));
}

std::span<const int> AnnotationSet::objects_with(int s, int label) const {
  if (label < 1 || label > n_labels_) throw std::out_of_range("label out of range");
  return bucket(annotator_label_offsets_, annotator_label_members_,
                static_cast<std::size_t>(s * n_labels_ + label - 1));
}

std::vector<int> AnnotationSet::label_counts(int e) const {
  std::vector<int> counts(static_cast<std::size_t>(n_labels_));
  for (int n = 1; n <= n_labels_; ++n) {
    counts[static_cast<std::size_t>(n - 1)] = static_cast<int>(annotators_with(e, n).size());
  }
  return counts;
}

AnnotationSet build_annotation_set(std::span<const LabelTriple> triples, const LabelSpace& space) {
  std::unordered_map<std::string, int> object_ids, annotator_ids;
  std::vector<std::string> object_names, annotator_names;
  std::vector<Annotation> annotations;
  annotations.reserve(triples.size());

  auto intern = [](std::unordered_map<std::string, int>& ids, std::vector<std::string>& names,
                   const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<int>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  };

  for (const auto& t : triples) {
    const int label = space.index_of(t.label);
    const int e = intern(object_ids, object_names, t.object);
    const int s = intern(annotator_ids, annotator_names, t.annotator);
    annotations.push_back({e, s, label});
  }
  return AnnotationSet(std::move(annotations), space.size(), std::move(object_names),
                       std::move(annotator_names));
}

}  // namespace crowd
