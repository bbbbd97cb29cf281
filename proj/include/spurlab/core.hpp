#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spurlab/rational.hpp"

namespace spurlab {

enum class Source : int { Real = 0, Synthetic = 1 };

inline const char* to_string(Source g) { return g == Source::Real ? "real" : "synthetic"; }
Source source_from_string(const std::string& s);

// Thrown when a probability is conditioned on an event with zero count.
// Distinct from a valid probability of 0 (supported condition, empty cell).
class ZeroSupportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct LabeledExample {
    std::vector<double> features;
    int class_y = 0;
    int bias_b = 0;
    Source source_g = Source::Real;
};

// Optional restriction of a probability query to a bias group and/or a
// data source. Empty condition means the plain marginal P(Y=y).
struct Condition {
    std::optional<int> bias_b;
    std::optional<Source> source_g;
};

// Exact integer counts per (class, bias group, source) cell. Cardinalities
// are declared, not inferred, so empty subgroups stay representable.
class SubgroupTable {
  public:
    SubgroupTable() = default;
    SubgroupTable(int n_classes, int n_bias);

    int n_classes() const { return n_classes_; }
    int n_bias() const { return n_bias_; }
    static constexpr int n_sources() { return 2; }

    std::int64_t count(int y, int b, Source g) const { return counts_[index(y, b, g)]; }
    void set_count(int y, int b, Source g, std::int64_t c);
    void add_count(int y, int b, Source g, std::int64_t c);

    std::int64_t marginal_yb(int y, int b) const;       // summed over sources
    std::int64_t class_total(int y) const;              // summed over b, g
    std::int64_t bias_total(int b) const;               // summed over y, g
    std::int64_t cell_total(int b, Source g) const;     // summed over y
    std::int64_t source_total(Source g) const;          // summed over y, b
    std::int64_t total() const;

    bool real_only() const { return source_total(Source::Synthetic) == 0; }

    // P(Y = y | condition) as an exact rational. Throws ZeroSupportError
    // when the condition has zero count, std::out_of_range on bad indices.
    Rational conditional_prob(int y, const Condition& condition = {}) const;

    friend bool operator==(const SubgroupTable&, const SubgroupTable&) = default;

    // CSV with header `y,b,g,count`, g in {real,synthetic}. All cells are
    // written (including zeros) so cardinalities round-trip.
    void write_csv(std::ostream& out) const;
    static SubgroupTable read_csv(std::istream& in);

  private:
    std::size_t index(int y, int b, Source g) const;
    void check_indices(int y, int b) const;

    int n_classes_ = 0;
    int n_bias_ = 0;
    std::vector<std::int64_t> counts_;
};

// Immutable sequence of examples with declared cardinalities and the
// subgroup table cached at construction.
class Dataset {
  public:
    Dataset(std::vector<LabeledExample> examples, int n_classes, int n_bias);

    const std::vector<LabeledExample>& examples() const { return examples_; }
    std::size_t size() const { return examples_.size(); }
    int n_classes() const { return n_classes_; }
    int n_bias() const { return n_bias_; }
    int dim() const { return dim_; }
    const SubgroupTable& table() const { return table_; }

    // Concatenation; produces a new dataset, cardinalities must agree.
    Dataset concatenated(const Dataset& other) const;

    // `x0..xd-1,y,b,g` rows.
    void write_csv(std::ostream& out) const;

  private:
    std::vector<LabeledExample> examples_;
    int n_classes_ = 0;
    int n_bias_ = 0;
    int dim_ = 0;
    SubgroupTable table_;
};

// Exact tally over a dataset. Throws std::invalid_argument when empty.
SubgroupTable count_table(const Dataset& dataset);

}  // namespace spurlab
