#include "poipg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poipg/errors.hpp"

namespace poipg {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Independent: return "independent";
        case Verdict::Dependent: return "dependent";
        case Verdict::InsufficientData: return "insufficient-data";
    }
    throw GraphError("unknown verdict");
}

bool CiOracle::independent(VertexSet x, VertexSet z, VertexSet y) const {
    CiStatement q = CiStatement::make(x, z, y);
    if (!(q.x | q.z | q.y).subset_of(VertexSet::first_n(universe_size())))
        throw CiError("query mentions positions outside the universe of " +
                      std::to_string(universe_size()) + " variables");
    queries_.fetch_add(1, std::memory_order_relaxed);
    return answer(q.x, q.z, q.y);
}

std::string CiOracle::describe_query(VertexSet x, VertexSet z, VertexSet y) const {
    const auto& names = universe();
    auto braces = [&](VertexSet s) {
        std::string out = "{";
        bool first = true;
        for (int v : s) {
            if (!first) out += ",";
            first = false;
            out += v < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(v)]
                                                      : "#" + std::to_string(v);
        }
        return out + "}";
    };
    return "x=" + braces(x) + " z=" + braces(z) + " y=" + braces(y);
}

namespace {

class GraphicalOracle final : public CiOracle {
public:
    explicit GraphicalOracle(Dag g) : g_(std::move(g)) {
        for (const Variable& v : g_.vertices())
            if (v.role == Role::Observed) {
                names_.push_back(v.name);
                ids_.push_back(v.id);
            }
        if (names_.empty()) throw GraphError("graphical oracle needs at least one observed vertex");
    }

    const std::vector<std::string>& universe() const override { return names_; }

protected:
    bool answer(VertexSet x, VertexSet z, VertexSet y) const override {
        return observable_independent(g_, remap(x), remap(z), remap(y));
    }

private:
    VertexSet remap(VertexSet s) const {
        VertexSet out;
        for (int pos : s) out.insert(ids_[static_cast<std::size_t>(pos)]);
        return out;
    }

    Dag g_;
    std::vector<std::string> names_;
    std::vector<int> ids_;
};

class TableOracle final : public CiOracle {
public:
    explicit TableOracle(CiSet cond) : cond_(std::move(cond)) {}

    const std::vector<std::string>& universe() const override { return cond_.universe(); }

protected:
    bool answer(VertexSet x, VertexSet z, VertexSet y) const override {
        // A stored X _||_ Z | Y0 entails x _||_ z | y when both query sides
        // embed in the stored sides and every extra conditioning variable was
        // dropped from a stored side: shrink a side, then move the removed
        // part into the conditioning set.
        for (const CiStatement& s : cond_.statements()) {
            if (!s.independent) continue;
            bool straight = x.subset_of(s.x) && z.subset_of(s.z);
            bool swapped = x.subset_of(s.z) && z.subset_of(s.x);
            if (!straight && !swapped) continue;
            if (!s.y.subset_of(y)) continue;
            VertexSet removed = (s.x - x - z) | (s.z - x - z);
            if ((y - s.y).subset_of(removed)) return true;
        }
        return false;
    }

private:
    CiSet cond_;
};

}  // namespace

std::shared_ptr<CiOracle> graphical_oracle(Dag g) {
    return std::make_shared<GraphicalOracle>(std::move(g));
}

std::shared_ptr<CiOracle> table_oracle(CiSet cond) {
    return std::make_shared<TableOracle>(std::move(cond));
}

Dataset::Dataset(std::vector<std::string> names, std::vector<int> arities,
                 std::vector<std::vector<std::uint8_t>> rows)
    : names_(std::move(names)), arities_(std::move(arities)), rows_(std::move(rows)) {
    if (names_.empty()) throw OracleError("dataset needs at least one column");
    if (names_.size() > static_cast<std::size_t>(VertexSet::max_id))
        throw OracleError("dataset limited to " + std::to_string(VertexSet::max_id) + " columns");
    if (arities_.size() != names_.size())
        throw OracleError("arity list length differs from column count");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty()) throw OracleError("empty column name");
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j]) throw OracleError("duplicate column name: " + names_[i]);
        if (arities_[i] < 2)
            throw OracleError("column " + names_[i] + " needs arity of at least 2");
        if (arities_[i] > 256) throw OracleError("column " + names_[i] + " exceeds arity 256");
    }
    if (rows_.empty()) throw OracleError("dataset needs at least one row");
    for (const auto& row : rows_) {
        if (row.size() != names_.size()) throw OracleError("row length differs from column count");
        for (std::size_t c = 0; c < row.size(); ++c)
            if (static_cast<int>(row[c]) >= arities_[c])
                throw OracleError("value " + std::to_string(row[c]) + " out of range for column " +
                                  names_[c]);
    }
}

namespace {

// x/z/y pre-coded per row; strata = number of distinct y codes
TestResult g2_core(const std::vector<int>& xcode, int rx, const std::vector<int>& zcode, int rz,
                   const std::vector<long>& ycode, long strata, double alpha, bool reduce_dof) {
    const long cells = strata * static_cast<long>(rx) * rz;
    if (cells > 50'000'000) throw OracleError("contingency table too large");
    std::vector<long> counts(static_cast<std::size_t>(cells), 0);
    const long n = static_cast<long>(xcode.size());
    for (long i = 0; i < n; ++i) {
        auto at = static_cast<std::size_t>((ycode[static_cast<std::size_t>(i)] * rx +
                                            xcode[static_cast<std::size_t>(i)]) *
                                               rz +
                                           zcode[static_cast<std::size_t>(i)]);
        ++counts[at];
    }

    double stat = 0.0;
    long empty = 0;
    std::vector<long> rowsum(static_cast<std::size_t>(rx));
    std::vector<long> colsum(static_cast<std::size_t>(rz));
    for (long s = 0; s < strata; ++s) {
        const long* cell = counts.data() + static_cast<std::size_t>(s) * rx * rz;
        long total = 0;
        std::fill(rowsum.begin(), rowsum.end(), 0);
        std::fill(colsum.begin(), colsum.end(), 0);
        for (int i = 0; i < rx; ++i)
            for (int j = 0; j < rz; ++j) {
                long o = cell[i * rz + j];
                total += o;
                rowsum[static_cast<std::size_t>(i)] += o;
                colsum[static_cast<std::size_t>(j)] += o;
            }
        if (total == 0) {
            ++empty;
            continue;
        }
        for (int i = 0; i < rx; ++i)
            for (int j = 0; j < rz; ++j) {
                long o = cell[i * rz + j];
                if (o == 0) continue;
                stat += static_cast<double>(o) *
                        std::log(static_cast<double>(o) * static_cast<double>(total) /
                                 (static_cast<double>(rowsum[static_cast<std::size_t>(i)]) *
                                  static_cast<double>(colsum[static_cast<std::size_t>(j)])));
            }
    }
    stat = std::max(0.0, 2.0 * stat);

    long dof = static_cast<long>(rx - 1) * (rz - 1) * (reduce_dof ? strata - empty : strata);
    dof = std::max<long>(dof, 0);

    TestResult r;
    r.statistic = stat;
    r.dof = static_cast<int>(dof);
    r.p_value = dof > 0 ? detail::chi_square_sf(stat, static_cast<int>(dof))
                        : (stat <= 1e-9 ? 1.0 : 0.0);
    if (n < 10 * dof)
        r.verdict = Verdict::InsufficientData;
    else
        r.verdict = r.p_value > alpha ? Verdict::Independent : Verdict::Dependent;
    return r;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw OracleError("alpha must lie strictly between 0 and 1");
}

}  // namespace

TestResult g2_test(const Dataset& data, int x, int z, VertexSet y, double alpha, bool reduce_dof) {
    check_alpha(alpha);
    const int cols = data.column_count();
    auto check_col = [&](int c) {
        if (c < 0 || c >= cols) throw OracleError("unknown column index: " + std::to_string(c));
    };
    check_col(x);
    check_col(z);
    if (x == z) throw OracleError("test sides refer to the same column");
    for (int c : y) {
        check_col(c);
        if (c == x || c == z) throw OracleError("conditioning set overlaps a test side");
    }

    const long n = data.row_count();
    std::vector<int> xcode(static_cast<std::size_t>(n));
    std::vector<int> zcode(static_cast<std::size_t>(n));
    std::vector<long> ycode(static_cast<std::size_t>(n), 0);
    long strata = 1;
    std::vector<std::pair<int, long>> ydigits;  // column, stride
    for (int c : y) {
        ydigits.emplace_back(c, strata);
        strata *= data.arities()[static_cast<std::size_t>(c)];
        if (strata > 50'000'000) throw OracleError("contingency table too large");
    }
    for (long i = 0; i < n; ++i) {
        xcode[static_cast<std::size_t>(i)] = data.cell(i, x);
        zcode[static_cast<std::size_t>(i)] = data.cell(i, z);
        long code = 0;
        for (auto [c, stride] : ydigits) code += static_cast<long>(data.cell(i, c)) * stride;
        ycode[static_cast<std::size_t>(i)] = code;
    }
    return g2_core(xcode, data.arities()[static_cast<std::size_t>(x)], zcode,
                   data.arities()[static_cast<std::size_t>(z)], ycode, strata, alpha, reduce_dof);
}

namespace {

class DataOracle final : public CiOracle {
public:
    DataOracle(Dataset data, double alpha, InsufficientPolicy policy)
        : data_(std::move(data)), alpha_(alpha), policy_(policy) {
        check_alpha(alpha_);
    }

    const std::vector<std::string>& universe() const override { return data_.names(); }

protected:
    bool answer(VertexSet x, VertexSet z, VertexSet y) const override {
        const long n = data_.row_count();
        auto composite = [&](VertexSet side, std::vector<int>& code) {
            long radix = 1;
            std::vector<std::pair<int, long>> digits;
            for (int c : side) {
                digits.emplace_back(c, radix);
                radix *= data_.arities()[static_cast<std::size_t>(c)];
                if (radix > 1'000'000) throw OracleError("composite column too large");
            }
            code.assign(static_cast<std::size_t>(n), 0);
            for (long i = 0; i < n; ++i) {
                long v = 0;
                for (auto [c, stride] : digits) v += static_cast<long>(data_.cell(i, c)) * stride;
                code[static_cast<std::size_t>(i)] = static_cast<int>(v);
            }
            return static_cast<int>(radix);
        };
        std::vector<int> xcode, zcode;
        int rx = composite(x, xcode);
        int rz = composite(z, zcode);
        long strata = 1;
        std::vector<std::pair<int, long>> ydigits;
        for (int c : y) {
            ydigits.emplace_back(c, strata);
            strata *= data_.arities()[static_cast<std::size_t>(c)];
            if (strata > 50'000'000) throw OracleError("contingency table too large");
        }
        std::vector<long> ycode(static_cast<std::size_t>(n), 0);
        for (long i = 0; i < n; ++i) {
            long code = 0;
            for (auto [c, stride] : ydigits) code += static_cast<long>(data_.cell(i, c)) * stride;
            ycode[static_cast<std::size_t>(i)] = code;
        }
        TestResult r = g2_core(xcode, rx, zcode, rz, ycode, strata, alpha_, true);
        if (r.verdict == Verdict::InsufficientData)
            return policy_ == InsufficientPolicy::AssumeIndependent;
        return r.verdict == Verdict::Independent;
    }

private:
    Dataset data_;
    double alpha_;
    InsufficientPolicy policy_;
};

}  // namespace

std::shared_ptr<CiOracle> data_oracle(Dataset data, double alpha, InsufficientPolicy policy) {
    return std::make_shared<DataOracle>(std::move(data), alpha, policy);
}

CachingOracle::CachingOracle(std::shared_ptr<CiOracle> inner) : inner_(std::move(inner)) {
    if (!inner_) throw OracleError("caching oracle needs an inner oracle");
}

bool CachingOracle::answer(VertexSet x, VertexSet z, VertexSet y) const {
    Key key{x.bits(), z.bits(), y.bits()};
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    bool v = inner_->independent(x, z, y);
    cache_.emplace(key, v);
    return v;
}

long CachingOracle::hits() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return hits_;
}

long CachingOracle::misses() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return misses_;
}

std::shared_ptr<CachingOracle> caching_oracle(std::shared_ptr<CiOracle> inner) {
    return std::make_shared<CachingOracle>(std::move(inner));
}

namespace detail {

// regularized upper incomplete gamma Q(dof/2, x/2): series below a+1,
// continued fraction above
double chi_square_sf(double x, int dof) {
    if (dof <= 0) throw OracleError("chi-square needs a positive degree of freedom");
    if (!(x >= 0.0)) throw OracleError("chi-square statistic must be nonnegative");
    const double a = 0.5 * dof;
    const double xx = 0.5 * x;
    if (xx == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (xx < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < 10000; ++k) {
            term *= xx / (a + k);
            sum += term;
            if (term < sum * 1e-16) break;
        }
        double p = sum * std::exp(-xx + a * std::log(xx) - lg);
        return std::clamp(1.0 - p, 0.0, 1.0);
    }
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    double b = xx + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    double q = std::exp(-xx + a * std::log(xx) - lg) * h;
    return std::clamp(q, 0.0, 1.0);
}

}  // namespace detail

}  // namespace poipg
