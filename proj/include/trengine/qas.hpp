// Quantum Airy structure amplitudes: the recursion on 2g-2+n with
// memoization over canonical (g, sorted mode multiset) keys. Inner sums are
// truncated exactly using the amplitude vanishing bound |k| <= 3g-3+n and
// the d = 2 vanishing profile of the tensors.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "trengine/scalar.hpp"

namespace trengine {

// (branch, order) packed so that numeric sort = (branch, order) lex sort.
using Mode = uint32_t;
inline Mode make_mode(int branch, int order) {
  return (Mode)((uint32_t)branch << 16 | (uint32_t)order);
}
inline int mode_branch(Mode m) { return (int)(m >> 16); }
inline int mode_order(Mode m) { return (int)(m & 0xffffu); }

struct AmplitudeKey {
  long g = 0;
  std::vector<Mode> modes;  // sorted ascending

  static AmplitudeKey make(long g, std::vector<Mode> modes) {
    std::sort(modes.begin(), modes.end());
    return AmplitudeKey{g, std::move(modes)};
  }
  long n() const { return (long)modes.size(); }
  long euler() const { return 2 * g - 2 + n(); }
  long order_sum() const {
    long s = 0;
    for (Mode m : modes) s += mode_order(m);
    return s;
  }
  bool operator==(const AmplitudeKey& o) const { return g == o.g && modes == o.modes; }
  bool operator<(const AmplitudeKey& o) const {
    if (euler() != o.euler()) return euler() < o.euler();
    if (g != o.g) return g < o.g;
    return modes < o.modes;
  }
};

struct AmplitudeKeyHash {
  size_t operator()(const AmplitudeKey& k) const {
    uint64_t h = 1469598103934665603ull ^ (uint64_t)k.g;
    for (Mode m : k.modes) {
      h ^= m + 1;
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

struct WorkLimitExceeded : std::runtime_error {
  size_t key_count;
  explicit WorkLimitExceeded(size_t n)
      : std::runtime_error("amplitude work limit exceeded at " + std::to_string(n) +
                           " cached keys"),
        key_count(n) {}
};

// Tensor suppliers with their vanishing data. Orders must stay within
// order_bound (the truncation the curve data was extracted to).
struct QuantumAiryStructure {
  int branch_count = 1;
  int order_bound = 0;
  // A_{(a,i),(b,j),(c,k)}, B_{(a,i),(b,j)}^{(c,k)}, C_{(a,i)}^{(b,j),(c,k)}, D_{(a,i)}
  std::function<Scalar(int, int, int, int, int, int)> A;
  std::function<Scalar(int, int, int, int, int, int)> B;
  std::function<Scalar(int, int, int, int, int, int)> C;
  std::function<Scalar(int, int)> D;
};

class AmplitudeTable {
 public:
  struct Row {
    long g;
    std::vector<Mode> modes;
    Scalar value;
  };

  void add(const AmplitudeKey& k, const Scalar& v) { rows_.push_back({k.g, k.modes, v}); }
  void sort() {
    std::sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) {
      AmplitudeKey ka{a.g, a.modes}, kb{b.g, b.modes};
      return ka < kb;
    });
  }
  const std::vector<Row>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }

  void write_csv(std::ostream& os) const {
    os << "g,n,branches,orders,value_exact,value_numeric\n";
    for (const auto& r : rows_) {
      os << r.g << "," << r.modes.size() << ",";
      for (size_t i = 0; i < r.modes.size(); ++i)
        os << (i ? ";" : "") << mode_branch(r.modes[i]);
      os << ",";
      for (size_t i = 0; i < r.modes.size(); ++i)
        os << (i ? ";" : "") << mode_order(r.modes[i]);
      CReal num = r.value.eval(lambda_default());
      os << "," << r.value.str() << "," << num.re.str();
      if (!num.im.is_zero()) os << "+" << num.im.str() << "i";
      os << "\n";
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows_) {
      nlohmann::json row;
      row["g"] = r.g;
      row["n"] = r.modes.size();
      auto br = nlohmann::json::array(), od = nlohmann::json::array();
      for (Mode m : r.modes) {
        br.push_back(mode_branch(m));
        od.push_back(mode_order(m));
      }
      row["branches"] = br;
      row["orders"] = od;
      row["value"] = r.value.to_json();
      CReal num = r.value.eval(lambda_default());
      row["numeric"] = {{"re", num.re.str()}, {"im", num.im.str()}};
      arr.push_back(row);
    }
    return nlohmann::json{{"table", arr}};
  }

 private:
  std::vector<Row> rows_;
};

class AmplitudeEngine {
 public:
  explicit AmplitudeEngine(QuantumAiryStructure qas, size_t work_limit = 20'000'000)
      : qas_(std::move(qas)), work_limit_(work_limit) {}

  const QuantumAiryStructure& qas() const { return qas_; }

  // F_{g; modes}; throws on unstable keys and on order overflow.
  Scalar amplitude(long g, std::vector<Mode> modes) {
    AmplitudeKey key = AmplitudeKey::make(g, std::move(modes));
    if (key.n() < 1 || key.euler() <= 0)
      throw std::invalid_argument("amplitude: unstable key (2g-2+n <= 0)");
    for (Mode m : key.modes) {
      if (mode_branch(m) >= qas_.branch_count)
        throw std::invalid_argument("amplitude: branch out of range");
      if (mode_order(m) > qas_.order_bound)
        throw std::invalid_argument("amplitude: order exceeds engine truncation bound");
    }
    return amp(key);
  }

  // Recomputes the recursion with each index of the key placed in the
  // distinguished first slot; true iff all pivot choices agree exactly.
  bool check_symmetry(long g, std::vector<Mode> modes) {
    AmplitudeKey key = AmplitudeKey::make(g, std::move(modes));
    if (key.euler() <= 0) throw std::invalid_argument("check_symmetry: unstable key");
    if (key.g == 0 && key.n() == 3) return true;  // initial condition, no recursion
    if (key.g == 1 && key.n() == 1) return true;
    bool have = false;
    Scalar ref;
    for (size_t p = 0; p < key.modes.size(); ++p) {
      if (p > 0 && key.modes[p] == key.modes[p - 1]) continue;
      std::vector<Mode> rest;
      for (size_t q = 0; q < key.modes.size(); ++q)
        if (q != p) rest.push_back(key.modes[q]);
      Scalar v = recurse(key.g, key.modes[p], rest);
      if (!have) {
        ref = v;
        have = true;
      } else if (!(v == ref)) {
        return false;
      }
    }
    return true;
  }

  // All amplitudes with 2g-2+n <= 2 g_max - 2 + n_max and n <= n_max.
  AmplitudeTable amplitude_batch(long g_max, long n_max, int parallelism = 1) {
    AmplitudeTable table;
    if (n_max < 1) return table;
    long chi_max = 2 * g_max - 2 + n_max;
    std::vector<AmplitudeKey> keys;
    for (long g = 0; g <= g_max + chi_max / 2; ++g) {
      for (long n = 1; n <= n_max; ++n) {
        long chi = 2 * g - 2 + n;
        if (chi <= 0 || chi > chi_max) continue;
        enumerate_keys(g, n, keys);
      }
    }
    std::sort(keys.begin(), keys.end());
    if (parallelism <= 1) {
      for (const auto& k : keys) table.add(k, amp(k));
    } else {
      std::vector<Scalar> values(keys.size());
      std::atomic<size_t> next{0};
      std::exception_ptr err;
      std::mutex err_mu;
      auto worker = [&] {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= keys.size()) break;
          try {
            values[i] = amp(keys[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
            break;
          }
        }
      };
      std::vector<std::thread> pool;
      for (int t = 0; t < parallelism; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      if (err) std::rethrow_exception(err);
      for (size_t i = 0; i < keys.size(); ++i) table.add(keys[i], values[i]);
    }
    table.sort();
    return table;
  }

  size_t cache_size() const {
    std::shared_lock lock(mu_);
    return memo_.size();
  }
  void clear_cache() {
    std::unique_lock lock(mu_);
    memo_.clear();
  }

 private:
  // internal: returns 0 for the unstable 2-point/1-point genus-0 cases
  Scalar amp(const AmplitudeKey& key) {
    const long g = key.g;
    const long n = key.n();
    if (g == 0 && n < 3) return Scalar();
    if (key.order_sum() > 3 * g - 3 + n) return Scalar();  // vanishing bound
    if (g == 0 && n == 3)
      return qas_.A(mode_branch(key.modes[0]), mode_order(key.modes[0]),
                    mode_branch(key.modes[1]), mode_order(key.modes[1]),
                    mode_branch(key.modes[2]), mode_order(key.modes[2]));
    if (g == 1 && n == 1) return qas_.D(mode_branch(key.modes[0]), mode_order(key.modes[0]));
    {
      std::shared_lock lock(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    std::vector<Mode> rest(key.modes.begin() + 1, key.modes.end());
    Scalar value = recurse(g, key.modes[0], rest);
    {
      std::unique_lock lock(mu_);
      if (memo_.size() >= work_limit_) throw WorkLimitExceeded(memo_.size());
      memo_.emplace(key, value);
    }
    return value;
  }

  Scalar amp_of(long g, std::vector<Mode> modes) {
    return amp(AmplitudeKey::make(g, std::move(modes)));
  }

  // recursion body with an explicit pivot; rest is sorted
  Scalar recurse(long g, Mode pivot, const std::vector<Mode>& rest) {
    const int a = mode_branch(pivot), i = mode_order(pivot);
    const long n = 1 + (long)rest.size();
    Scalar acc;

    // B-sum over removed legs (occurrences grouped by multiplicity)
    long rest_sum = 0;
    for (Mode m : rest) rest_sum += mode_order(m);
    for (size_t p = 0; p < rest.size(); ++p) {
      if (p > 0 && rest[p] == rest[p - 1]) continue;
      long mult = 1;
      for (size_t q = p + 1; q < rest.size() && rest[q] == rest[p]; ++q) ++mult;
      const int b = mode_branch(rest[p]), j = mode_order(rest[p]);
      if (b != a) continue;  // both B-terms carry delta_{a,b}
      std::vector<Mode> rest_minus;
      rest_minus.reserve(rest.size() - 1);
      for (size_t q = 0; q < rest.size(); ++q)
        if (q != p) rest_minus.push_back(rest[q]);
      long smin = rest_sum - j;
      long kmax = 3 * g - 3 + (n - 1) - smin;
      Scalar leg;
      for (int c = 0; c < qas_.branch_count; ++c) {
        if (c != a && !(i == 0 && j == 0)) continue;  // tensor branch deltas
        for (long k = 0; k <= kmax; ++k) {
          Scalar t = qas_.B(a, i, b, j, c, (int)k);
          if (t.is_zero()) continue;
          std::vector<Mode> next = rest_minus;
          next.push_back(make_mode(c, (int)k));
          Scalar f = amp_of(g, std::move(next));
          if (f.is_zero()) continue;
          leg += t * f;
        }
      }
      acc += Scalar(rat_of(mult)) * leg;
    }

    // C-sum, genus-reduced piece
    const Scalar half = Scalar::of_rat(1, 2);
    if (g >= 1) {
      long jk_max = 3 * (g - 1) - 3 + (n + 1) - rest_sum;
      for (int b = 0; b < qas_.branch_count; ++b)
        for (int c = 0; c < qas_.branch_count; ++c) {
          if (i > 0 && b != a && c != a) continue;  // every C-term has a branch delta on a
          for (long j = 0; j <= jk_max; ++j)
            for (long k = 0; j + k <= jk_max; ++k) {
              Scalar t = qas_.C(a, i, b, (int)j, c, (int)k);
              if (t.is_zero()) continue;
              std::vector<Mode> next = rest;
              next.push_back(make_mode(b, (int)j));
              next.push_back(make_mode(c, (int)k));
              Scalar f = amp_of(g - 1, std::move(next));
              if (f.is_zero()) continue;
              acc += half * t * f;
            }
        }
    }

    // C-sum, stable bipartitions (ordered splits; F_{0;*} and F_{0;*,*} drop)
    std::vector<std::pair<Mode, long>> runs;
    for (Mode m : rest) {
      if (!runs.empty() && runs.back().first == m)
        runs.back().second++;
      else
        runs.emplace_back(m, 1);
    }
    std::vector<long> take(runs.size(), 0);
    while (true) {
      long sz1 = 0, sum1 = 0;
      for (size_t r = 0; r < runs.size(); ++r) {
        sz1 += take[r];
        sum1 += take[r] * mode_order(runs[r].first);
      }
      long ways = 1;
      for (size_t r = 0; r < runs.size(); ++r) {
        Int w = binomial(runs[r].second, take[r]);
        ways *= w.get_si();
      }
      std::vector<Mode> I1, I2;
      for (size_t r = 0; r < runs.size(); ++r) {
        for (long q = 0; q < take[r]; ++q) I1.push_back(runs[r].first);
        for (long q = 0; q < runs[r].second - take[r]; ++q) I2.push_back(runs[r].first);
      }
      long sz2 = (long)rest.size() - sz1, sum2 = rest_sum - sum1;
      for (long g1 = 0; g1 <= g; ++g1) {
        long g2 = g - g1;
        if (2 * g1 - 2 + (1 + sz1) <= 0 || 2 * g2 - 2 + (1 + sz2) <= 0) continue;
        long jmax = 3 * g1 - 3 + (1 + sz1) - sum1;
        long kmax = 3 * g2 - 3 + (1 + sz2) - sum2;
        if (jmax < 0 || kmax < 0) continue;
        for (int b = 0; b < qas_.branch_count; ++b) {
          for (long j = 0; j <= jmax; ++j) {
            std::vector<Mode> key1 = I1;
            key1.push_back(make_mode(b, (int)j));
            Scalar f1 = amp_of(g1, std::move(key1));
            if (f1.is_zero()) continue;
            for (int c = 0; c < qas_.branch_count; ++c) {
              if (i > 0 && b != a && c != a) continue;
              for (long k = 0; k <= kmax; ++k) {
                Scalar t = qas_.C(a, i, b, (int)j, c, (int)k);
                if (t.is_zero()) continue;
                std::vector<Mode> key2 = I2;
                key2.push_back(make_mode(c, (int)k));
                Scalar f2 = amp_of(g2, std::move(key2));
                if (f2.is_zero()) continue;
                acc += Scalar(rat_of(ways)) * half * t * f1 * f2;
              }
            }
          }
        }
      }
      size_t r = 0;
      while (r < runs.size() && take[r] == runs[r].second) take[r++] = 0;
      if (r == runs.size()) break;
      take[r]++;
    }

    return acc;
  }

  void enumerate_keys(long g, long n, std::vector<AmplitudeKey>& out) {
    long budget = 3 * g - 3 + n;
    std::vector<Mode> cur;
    enumerate_rec(g, n, budget, 0, cur, out);
  }
  void enumerate_rec(long g, long n, long budget, Mode min_mode, std::vector<Mode>& cur,
                     std::vector<AmplitudeKey>& out) {
    if ((long)cur.size() == n) {
      out.push_back(AmplitudeKey{g, cur});
      return;
    }
    for (int b = 0; b < qas_.branch_count; ++b)
      for (long k = 0; k <= budget; ++k) {
        Mode m = make_mode(b, (int)k);
        if (m < min_mode) continue;
        cur.push_back(m);
        enumerate_rec(g, n, budget - k, m, cur, out);
        cur.pop_back();
      }
  }

  QuantumAiryStructure qas_;
  size_t work_limit_;
  mutable std::shared_mutex mu_;
  std::unordered_map<AmplitudeKey, Scalar, AmplitudeKeyHash> memo_;
};

}  // namespace trengine
