#pragma once

#include <map>
#include <memory>
#include <vector>

namespace lclt {

// Exponent vector nu of a monomial x^nu. The order |nu| is the sum of
// the entries.
using MultiIndex = std::vector<int>;

int order_of(const MultiIndex& nu);

double factorial(int n);
double multi_index_factorial(const MultiIndex& nu);  // nu! = prod_j nu_j!

/// Dense enumeration of all multi-indices with |nu| <= max_degree, in
/// graded lexicographic order (index 0 is the zero multi-index).
/// Instances are immutable and shared through a process-wide cache.
class MultiIndexTable {
  public:
    static std::shared_ptr<const MultiIndexTable> get(int dim, int max_degree);

    int dim() const { return dim_; }
    int max_degree() const { return max_degree_; }
    std::size_t size() const { return list_.size(); }
    const MultiIndex& at(std::size_t i) const { return list_[i]; }
    std::size_t index_of(const MultiIndex& nu) const;  // throws PreconditionError if absent

  private:
    MultiIndexTable(int dim, int max_degree);

    int dim_;
    int max_degree_;
    std::vector<MultiIndex> list_;
    std::map<MultiIndex, std::size_t> index_;
};

}  // namespace lclt
