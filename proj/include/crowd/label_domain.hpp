#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace crowd {

// Tolerance for simplex sum checks on parameter vectors.
inline constexpr double kSimplexTolerance = 1e-9;

// Ordered set of label names. Labels are addressed by 1-based index
// internally; names only appear at the I/O boundary.
class LabelSpace {
 public:
  explicit LabelSpace(std::vector<std::string> names);

  // Labels "1".."n".
  static LabelSpace ordinal(int n);

  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  bool contains(std::string_view name) const;
  int index_of(std::string_view name) const;
  const std::string& name_of(int label) const;

  bool operator==(const LabelSpace& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

int label_to_index(const LabelSpace& space, std::string_view name);
const std::string& index_to_label(const LabelSpace& space, int label);

// One label given by one annotator to one object. Ids are dense
// (0-based); the label is 1-based.
struct Annotation {
  int object = 0;
  int annotator = 0;
  int label = 1;

  bool operator==(const Annotation&) const = default;
};

// Per-object categorical ground truth (length N, sums to one).
using GroundTruthDistribution = std::vector<double>;

struct AnnotatorProfile {
  double epsilon = 0.5;
  std::vector<double> pi;
};

bool is_simplex(std::span<const double> p, double tol = kSimplexTolerance);
void check_simplex(std::span<const double> p, double tol, const std::string& what);
void check_profile(const AnnotatorProfile& profile, int n_labels);

// Immutable sparse label matrix with the four index sets used by EM:
//   annotators_of(e)      l_e
//   objects_of(s)         l_s
//   annotators_with(e, n) l_{e,n}
//   objects_with(s, n)    l_{s,n}
// plus entry lists (positions into annotations()) grouped by object and by
// annotator, in ascending annotator / object order respectively.
class AnnotationSet {
 public:
  AnnotationSet() = default;

  // Counts come from the name vectors; objects without annotations are
  // allowed here and rejected later by whatever needs coverage.
  AnnotationSet(std::vector<Annotation> annotations, int n_labels,
                std::vector<std::string> object_names,
                std::vector<std::string> annotator_names);

  int n_objects() const noexcept { return static_cast<int>(object_names_.size()); }
  int n_annotators() const noexcept { return static_cast<int>(annotator_names_.size()); }
  int n_labels() const noexcept { return n_labels_; }
  std::size_t size() const noexcept { return annotations_.size(); }
  bool empty() const noexcept { return annotations_.empty(); }

  std::span<const Annotation> annotations() const noexcept { return annotations_; }
  const Annotation& operator[](std::size_t i) const { return annotations_[i]; }

  const std::vector<std::string>& object_names() const noexcept { return object_names_; }
  const std::vector<std::string>& annotator_names() const noexcept { return annotator_names_; }

  std::span<const int> object_entries(int e) const;
  std::span<const int> annotator_entries(int s) const;

  std::span<const int> annotators_of(int e) const;
  std::span<const int> objects_of(int s) const;
  std::span<const int> annotators_with(int e, int label) const;
  std::span<const int> objects_with(int s, int label) const;

  // |l_{e,n}| for n = 1..N, as a length-N vector.
  std::vector<int> label_counts(int e) const;

 private:
  int n_labels_ = 0;
  std::vector<Annotation> annotations_;
  std::vector<std::string> object_names_;
  std::vector<std::string> annotator_names_;

  // CSR layouts.
  std::vector<int> object_offsets_, object_entries_, object_members_;
  std::vector<int> annotator_offsets_, annotator_entries_, annotator_members_;
  std::vector<int> object_label_offsets_, object_label_members_;
  std::vector<int> annotator_label_offsets_, annotator_label_members_;
};

struct LabelTriple {
  std::string object;
  std::string annotator;
  std::string label;
};

// Interns ids in first-appearance order and builds all index sets.
// Throws InputError for unknown labels, DuplicateAnnotationError for a
// repeated (object, annotator) pair.
AnnotationSet build_annotation_set(std::span<const LabelTriple> triples, const LabelSpace& space);

}  // namespace crowd
