#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "poipg/graph.hpp"
#include "poipg/separation.hpp"
#include "poipg/vertex_set.hpp"

namespace poipg {

enum class Verdict { Independent, Dependent, InsufficientData };

const char* verdict_name(Verdict v);

// Conditional-independence source. Queries are stated in universe positions;
// the base class validates, canonicalizes (x and z swapped so min(x) < min(z))
// and counts every query before dispatching.
class CiOracle {
public:
    virtual ~CiOracle() = default;

    virtual const std::vector<std::string>& universe() const = 0;
    int universe_size() const { return static_cast<int>(universe().size()); }

    bool independent(VertexSet x, VertexSet z, VertexSet y) const;
    long query_count() const { return queries_.load(); }

    // "x={A} z={B} y={C,D}" for diagnostics
    std::string describe_query(VertexSet x, VertexSet z, VertexSet y) const;

protected:
    virtual bool answer(VertexSet x, VertexSet z, VertexSet y) const = 0;

private:
    mutable std::atomic<long> queries_{0};
};

// Answers from d-separation in g, always conditioning on the selection set.
// The universe is g's observed vertices in ascending id order.
std::shared_ptr<CiOracle> graphical_oracle(Dag g);

// Closed-world answers from an explicit statement set: a query is independent
// exactly when some stored statement entails it by dropping variables from
// either side (decomposition), with the dropped variables allowed to move
// into the conditioning set (weak union). Anything else is dependent.
std::shared_ptr<CiOracle> table_oracle(CiSet cond);

// Complete-case discrete data. Cells are category codes below the declared
// per-column arity.
class Dataset {
public:
    Dataset(std::vector<std::string> names, std::vector<int> arities,
            std::vector<std::vector<std::uint8_t>> rows);

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& arities() const { return arities_; }
    int column_count() const { return static_cast<int>(names_.size()); }
    long row_count() const { return static_cast<long>(rows_.size()); }
    std::uint8_t cell(long row, int col) const {
        return rows_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
    }

private:
    std::vector<std::string> names_;
    std::vector<int> arities_;
    std::vector<std::vector<std::uint8_t>> rows_;
};

struct TestResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    Verdict verdict = Verdict::Independent;
};

// Likelihood-ratio independence test of columns x and z within every stratum
// of the y columns. reduce_dof drops (arity(x)-1)(arity(z)-1) for each
// conditioning stratum that holds no rows. InsufficientData when
// row_count < 10 * dof.
TestResult g2_test(const Dataset& data, int x, int z, VertexSet y, double alpha,
                   bool reduce_dof = true);

enum class InsufficientPolicy { AssumeDependent, AssumeIndependent };

// Answers via g2_test; set-valued x or z are tested as jointly coded composite
// columns. The universe is the dataset's columns in order.
std::shared_ptr<CiOracle> data_oracle(Dataset data, double alpha,
                                      InsufficientPolicy policy = InsufficientPolicy::AssumeDependent);

// Memoizes canonical queries so each distinct one reaches the inner oracle at
// most once.
class CachingOracle : public CiOracle {
public:
    explicit CachingOracle(std::shared_ptr<CiOracle> inner);

    const std::vector<std::string>& universe() const override { return inner_->universe(); }
    long hits() const;
    long misses() const;

protected:
    bool answer(VertexSet x, VertexSet z, VertexSet y) const override;

private:
    struct Key {
        std::uint64_t x, z, y;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = k.x * 0x9e3779b97f4a7c15ull;
            h ^= k.z + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h ^= k.y + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    std::shared_ptr<CiOracle> inner_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<Key, bool, KeyHash> cache_;
    mutable long hits_ = 0;
    mutable long misses_ = 0;
};

std::shared_ptr<CachingOracle> caching_oracle(std::shared_ptr<CiOracle> inner);

namespace detail {
// upper tail probability of the chi-square distribution
double chi_square_sf(double x, int dof);
}  // namespace detail

}  // namespace poipg
