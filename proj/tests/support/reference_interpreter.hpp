#pragma once

// Step-by-step reimplementation of the PSACCF decision loop on plain arrays.
// Deliberately shares no code with the library: counters, ratios, sorts and
// fairness are all recomputed here from scratch.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

struct Input {
    std::vector<std::vector<double>> R;  // R[k][n]
    std::vector<double> c_ava;
    std::vector<std::int64_t> queue;
    std::vector<std::int64_t> cum_a;  // already including this slot's losses in cum_c
    std::vector<std::int64_t> cum_c;
    std::vector<double> w;
    double epsilon = 0.1;
    double varphi = 1.0;
};

class Interpreter {
public:
    explicit Interpreter(Input in) : in_(std::move(in)), K_(in_.queue.size()), N_(in_.c_ava.size()) {
        a_.assign(K_, 0);
        l_ = in_.queue;
        ca_ = in_.cum_a;
        cc_ = in_.cum_c;
    }

    std::vector<std::int64_t> run() {
        amend_priority();
        if (indicator() == 1) {
            for (;;) {
                high_priority_pass();
                const auto tar = targets();
                if (!approach(tar)) break;
            }
        }
        return a_;
    }

private:
    static constexpr double tol = 1e-9;

    double alpha(std::size_t k) const {
        if (cc_[k] == 0) return 1.0;
        return static_cast<double>(ca_[k]) / static_cast<double>(cc_[k]);
    }

    std::vector<double> alphas() const {
        std::vector<double> out(K_);
        for (std::size_t k = 0; k < K_; ++k) out[k] = alpha(k);
        return out;
    }

    // I(alpha): 0 as soon as some class sits below the best lower class.
    int indicator() const {
        const auto al = alphas();
        for (std::size_t k = 1; k < K_; ++k) {
            for (std::size_t j = 0; j < k; ++j) {
                if (al[k] < al[j] - tol) return 0;
            }
        }
        return 1;
    }

    std::vector<std::size_t> violators() const {
        const auto al = alphas();
        std::vector<std::size_t> v;
        for (std::size_t k = 1; k < K_; ++k) {
            bool bad = false;
            for (std::size_t j = 0; j < k; ++j) bad = bad || al[k] < al[j] - tol;
            if (bad) v.push_back(k);
        }
        return v;
    }

    double fairness() const {
        if (K_ <= 1) return 1.0;
        if (indicator() == 0) return 0.0;
        const auto al = alphas();
        double s = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k + 1 < K_; ++k) {
            double x = al[k + 1] - al[k];
            if (x < 0.0) x = 0.0;
            x /= in_.w[k];
            s += x;
            s2 += x * x;
        }
        if (s2 == 0.0) return 1.0;
        const double f = (s * s) / (static_cast<double>(K_ - 1) * s2);
        return f > 1.0 ? 1.0 : f;
    }

    // R . (a + e_k) <= c_ava
    bool fits(std::size_t k) const {
        for (std::size_t n = 0; n < N_; ++n) {
            double idle = in_.c_ava[n];
            for (std::size_t j = 0; j < K_; ++j) {
                if (a_[j] != 0) idle -= in_.R[j][n] * static_cast<double>(a_[j]);
            }
            if (idle - in_.R[k][n] < -tol) return false;
        }
        return true;
    }

    std::vector<double> idle() const {
        std::vector<double> out(N_);
        for (std::size_t n = 0; n < N_; ++n) {
            double v = in_.c_ava[n];
            for (std::size_t j = 0; j < K_; ++j) {
                if (a_[j] != 0) v -= in_.R[j][n] * static_cast<double>(a_[j]);
            }
            out[n] = v < 0.0 ? 0.0 : v;
        }
        return out;
    }

    double re(std::size_t k, const std::vector<double>& idl) const {
        std::size_t dr = N_;
        double best = -1.0;
        for (std::size_t n = 0; n < N_; ++n) {
            if (!(in_.R[k][n] > 0.0)) continue;
            const double ratio = idl[n] <= 0.0 ? std::numeric_limits<double>::infinity() : in_.R[k][n] / idl[n];
            if (ratio > best) {
                best = ratio;
                dr = n;
            }
        }
        const double deriv = (1.0 - alpha(k)) / (1.0 + static_cast<double>(cc_[k]));
        return deriv / in_.R[k][dr];
    }

    void admit(std::size_t k) {
        ++a_[k];
        --l_[k];
        ++ca_[k];
        ++cc_[k];
    }

    // insertion sort, descending by key; equal keys: larger class first
    static void sort_re(std::vector<std::size_t>& v, const std::vector<double>& key) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            for (std::size_t j = i; j > 0; --j) {
                const auto x = v[j - 1], y = v[j];
                const bool swap = key[y] > key[x] || (key[y] == key[x] && y > x);
                if (!swap) break;
                v[j - 1] = y;
                v[j] = x;
            }
        }
    }

    // stable insertion sort, descending by key
    static void stable_sort_desc(std::vector<std::size_t>& v, const std::vector<double>& key) {
        for (std::size_t i = 1; i < v.size(); ++i) {
            for (std::size_t j = i; j > 0 && key[v[j]] > key[v[j - 1]]; --j) std::swap(v[j], v[j - 1]);
        }
    }

    void amend_priority() {
        while (indicator() == 0) {
            std::vector<std::size_t> V;
            for (auto k : violators()) {
                if (l_[k] > 0) V.push_back(k);
            }
            const auto idl = idle();
            std::vector<double> key(K_, 0.0);
            for (auto k : V) key[k] = re(k, idl);
            sort_re(V, key);
            bool changed = false;
            for (auto k : V) {
                if (fits(k)) {
                    admit(k);
                    changed = true;
                    break;
                }
            }
            if (!changed) break;
        }
    }

    void high_priority_pass() {
        while (fairness() >= in_.varphi - tol) {
            bool changed = false;
            for (std::size_t i = K_; i-- > 0;) {
                if (l_[i] > 0 && fits(i)) {
                    admit(i);
                    changed = true;
                    break;
                }
            }
            if (!changed) break;
        }
    }

    std::vector<double> targets() const {
        const auto al = alphas();
        if (K_ <= 1) return al;
        auto wsum = [&](std::size_t from, std::size_t to) {  // sum of w_i, i in [from, to)
            double s = 0.0;
            for (std::size_t i = to; i-- > from;) s += in_.w[i];
            return s;
        };
        const double total = in_.epsilon * wsum(0, K_ - 1);
        std::vector<double> tar(K_);
        if (al[K_ - 1] - al[0] > total) {
            for (std::size_t k = 0; k < K_; ++k) tar[k] = al[K_ - 1] - in_.epsilon * wsum(k, K_ - 1);
        } else if (al[0] + total <= 1.0) {
            double acc = 0.0;
            for (std::size_t k = 0; k < K_; ++k) {
                tar[k] = al[0] + in_.epsilon * acc;
                if (k + 1 < K_) acc += in_.w[k];
            }
        } else {
            for (std::size_t k = 0; k < K_; ++k) {
                const double v = 1.0 - in_.epsilon * wsum(k, K_ - 1);
                tar[k] = v > 0.0 ? v : 0.0;
            }
        }
        return tar;
    }

    bool approach(const std::vector<double>& tar) {
        const auto idl = idle();
        std::vector<std::size_t> P;
        std::vector<double> rekey(K_, 0.0), td(K_, 0.0);
        for (std::size_t k = 0; k < K_; ++k) {
            if (alpha(k) < tar[k] - tol && l_[k] > 0) {
                P.push_back(k);
                rekey[k] = re(k, idl);
                td[k] = tar[k] - alpha(k);
            }
        }
        sort_re(P, rekey);
        stable_sort_desc(P, td);
        for (auto k : P) {
            if (fits(k)) {
                admit(k);
                return true;
            }
        }
        return false;
    }

    Input in_;
    std::size_t K_;
    std::size_t N_;
    std::vector<std::int64_t> a_;
    std::vector<std::int64_t> l_;
    std::vector<std::int64_t> ca_;
    std::vector<std::int64_t> cc_;
};

inline std::vector<std::int64_t> decide(Input in) { return Interpreter(std::move(in)).run(); }

}  // namespace oracle
