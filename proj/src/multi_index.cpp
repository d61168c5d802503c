#include "lclt/multi_index.hpp"

#include <algorithm>
#include <mutex>

#include "lclt/errors.hpp"

namespace lclt {

int order_of(const MultiIndex& nu) {
    int s = 0;
    for (int e : nu) s += e;
    return s;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double multi_index_factorial(const MultiIndex& nu) {
    double f = 1.0;
    for (int e : nu) f *= factorial(e);
    return f;
}

namespace {

void enumerate_degree(int dim, int degree, MultiIndex& cur, int axis,
                      std::vector<MultiIndex>& out) {
    if (axis == dim - 1) {
        cur[axis] = degree;
        out.push_back(cur);
        return;
    }
    for (int e = degree; e >= 0; --e) {
        cur[axis] = e;
        enumerate_degree(dim, degree - e, cur, axis + 1, out);
    }
}

}  // namespace

MultiIndexTable::MultiIndexTable(int dim, int max_degree) : dim_(dim), max_degree_(max_degree) {
    if (dim < 1 || max_degree < 0)
        throw PreconditionError("MultiIndexTable: dim must be >= 1 and max_degree >= 0");
    MultiIndex cur(dim, 0);
    for (int deg = 0; deg <= max_degree; ++deg) enumerate_degree(dim, deg, cur, 0, list_);
    for (std::size_t i = 0; i < list_.size(); ++i) index_[list_[i]] = i;
}

std::size_t MultiIndexTable::index_of(const MultiIndex& nu) const {
    auto it = index_.find(nu);
    if (it == index_.end())
        throw PreconditionError("multi-index outside the table (wrong dim or degree)");
    return it->second;
}

std::shared_ptr<const MultiIndexTable> MultiIndexTable::get(int dim, int max_degree) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexTable>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(dim, max_degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto table = std::shared_ptr<const MultiIndexTable>(new MultiIndexTable(dim, max_degree));
    cache[key] = table;
    return table;
}

}  // namespace lclt
