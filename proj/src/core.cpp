#include "spurlab/core.hpp"

#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace spurlab {

Source source_from_string(const std::string& s) {
    if (s == "real") return Source::Real;
    if (s == "synthetic") return Source::Synthetic;
    throw std::invalid_argument("unknown source label: " + s);
}

SubgroupTable::SubgroupTable(int n_classes, int n_bias)
    : n_classes_(n_classes), n_bias_(n_bias),
      counts_(static_cast<std::size_t>(n_classes) * n_bias * n_sources(), 0) {
    if (n_classes < 1 || n_bias < 1)
        throw std::invalid_argument("SubgroupTable: cardinalities must be positive");
}

std::size_t SubgroupTable::index(int y, int b, Source g) const {
    check_indices(y, b);
    return (static_cast<std::size_t>(y) * n_bias_ + b) * n_sources() + static_cast<int>(g);
}

void SubgroupTable::check_indices(int y, int b) const {
    if (y < 0 || y >= n_classes_) throw std::out_of_range("class index out of range");
    if (b < 0 || b >= n_bias_) throw std::out_of_range("bias index out of range");
}

void SubgroupTable::set_count(int y, int b, Source g, std::int64_t c) {
    if (c < 0) throw std::invalid_argument("counts must be non-negative");
    counts_[index(y, b, g)] = c;
}

void SubgroupTable::add_count(int y, int b, Source g, std::int64_t c) {
    auto& cell = counts_[index(y, b, g)];
    if (cell + c < 0) throw std::invalid_argument("counts must be non-negative");
    cell += c;
}

std::int64_t SubgroupTable::marginal_yb(int y, int b) const {
    return count(y, b, Source::Real) + count(y, b, Source::Synthetic);
}

std::int64_t SubgroupTable::class_total(int y) const {
    std::int64_t t = 0;
    for (int b = 0; b < n_bias_; ++b) t += marginal_yb(y, b);
    return t;
}

std::int64_t SubgroupTable::bias_total(int b) const {
    std::int64_t t = 0;
    for (int y = 0; y < n_classes_; ++y) t += marginal_yb(y, b);
    return t;
}

std::int64_t SubgroupTable::cell_total(int b, Source g) const {
    std::int64_t t = 0;
    for (int y = 0; y < n_classes_; ++y) t += count(y, b, g);
    return t;
}

std::int64_t SubgroupTable::source_total(Source g) const {
    std::int64_t t = 0;
    for (int y = 0; y < n_classes_; ++y)
        for (int b = 0; b < n_bias_; ++b) t += count(y, b, g);
    return t;
}

std::int64_t SubgroupTable::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

Rational SubgroupTable::conditional_prob(int y, const Condition& condition) const {
    check_indices(y, condition.bias_b.value_or(0));
    std::int64_t matching = 0;  // condition AND Y=y
    std::int64_t support = 0;   // condition alone
    for (int b = 0; b < n_bias_; ++b) {
        if (condition.bias_b && *condition.bias_b != b) continue;
        for (int g = 0; g < n_sources(); ++g) {
            const Source src = static_cast<Source>(g);
            if (condition.source_g && *condition.source_g != src) continue;
            support += cell_total(b, src);
            matching += count(y, b, src);
        }
    }
    if (support == 0) throw ZeroSupportError("conditional_prob: condition has zero support");
    return Rational(matching, support);
}

void SubgroupTable::write_csv(std::ostream& out) const {
    out << "y,b,g,count\n";
    for (int y = 0; y < n_classes_; ++y)
        for (int b = 0; b < n_bias_; ++b)
            for (int g = 0; g < n_sources(); ++g) {
                const Source src = static_cast<Source>(g);
                out << y << ',' << b << ',' << to_string(src) << ',' << count(y, b, src) << '\n';
            }
}

SubgroupTable SubgroupTable::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("subgroup table CSV: empty input");
    if (line != "y,b,g,count" && line != "y,b,g,count\r")
        throw std::invalid_argument("subgroup table CSV: expected header y,b,g,count");

    struct Row {
        int y, b;
        Source g;
        std::int64_t c;
    };
    std::vector<Row> rows;
    int max_y = -1, max_b = -1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string fy, fb, fg, fc;
        if (!std::getline(ls, fy, ',') || !std::getline(ls, fb, ',') ||
            !std::getline(ls, fg, ',') || !std::getline(ls, fc))
            throw std::invalid_argument("subgroup table CSV: malformed row: " + line);
        Row r{std::stoi(fy), std::stoi(fb), source_from_string(fg), std::stoll(fc)};
        if (r.y < 0 || r.b < 0 || r.c < 0)
            throw std::invalid_argument("subgroup table CSV: negative value in row: " + line);
        max_y = std::max(max_y, r.y);
        max_b = std::max(max_b, r.b);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::invalid_argument("subgroup table CSV: no rows");
    SubgroupTable table(max_y + 1, max_b + 1);
    for (const Row& r : rows) table.add_count(r.y, r.b, r.g, r.c);
    return table;
}

Dataset::Dataset(std::vector<LabeledExample> examples, int n_classes, int n_bias)
    : examples_(std::move(examples)), n_classes_(n_classes), n_bias_(n_bias),
      table_(n_classes, n_bias) {
    dim_ = examples_.empty() ? 0 : static_cast<int>(examples_.front().features.size());
    for (const auto& ex : examples_) {
        if (static_cast<int>(ex.features.size()) != dim_)
            throw std::invalid_argument("Dataset: inconsistent feature dimension");
        if (ex.class_y < 0 || ex.class_y >= n_classes_)
            throw std::invalid_argument("Dataset: class label out of declared range");
        if (ex.bias_b < 0 || ex.bias_b >= n_bias_)
            throw std::invalid_argument("Dataset: bias label out of declared range");
        table_.add_count(ex.class_y, ex.bias_b, ex.source_g, 1);
    }
}

Dataset Dataset::concatenated(const Dataset& other) const {
    if (other.n_classes_ != n_classes_ || other.n_bias_ != n_bias_)
        throw std::invalid_argument("Dataset: cardinality mismatch in concatenation");
    std::vector<LabeledExample> merged = examples_;
    merged.insert(merged.end(), other.examples_.begin(), other.examples_.end());
    return Dataset(std::move(merged), n_classes_, n_bias_);
}

void Dataset::write_csv(std::ostream& out) const {
    for (int i = 0; i < dim_; ++i) out << 'x' << i << ',';
    out << "y,b,g\n";
    out.precision(17);
    for (const auto& ex : examples_) {
        for (double v : ex.features) out << v << ',';
        out << ex.class_y << ',' << ex.bias_b << ',' << to_string(ex.source_g) << '\n';
    }
}

SubgroupTable count_table(const Dataset& dataset) {
    if (dataset.size() == 0) throw std::invalid_argument("count_table: empty dataset");
    SubgroupTable table(dataset.n_classes(), dataset.n_bias());
    for (const auto& ex : dataset.examples()) table.add_count(ex.class_y, ex.bias_b, ex.source_g, 1);
    return table;
}

}  // namespace spurlab
