// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eotheta/field.hpp"
#include "eotheta/matrix.hpp"

namespace eotheta {

class RingElem;

/// The ring F_{p^k}[t_1..t_d] truncated at total degree > cutoff: the
/// coordinate ring of a formal polydisc neighborhood at the precision the
/// verified identities need. The exterior differential lowers degree, so
/// every identity of sections of degree <= cutoff is checked exactly.
///
/// Rings are interned; elements hold a stable pointer.
class TruncRing {
public:
    static const TruncRing& get(const ExtField& F, int nvars, int cutoff);

    const ExtField& field() const { return *field_; }
    int nvars() const { return nvars_; }
    int cutoff() const { return cutoff_; }

    RingElem zero() const;
    RingElem one() const;
    RingElem constant(const Fq& c) const;
    RingElem var(int i) const;  // t_{i+1}

private:
    TruncRing(const ExtField& F, int nvars, int cutoff)
        : field_(&F), nvars_(nvars), cutoff_(cutoff) {
        if (nvars < 0) throw std::invalid_argument("negative variable count");
        if (cutoff < 0) throw std::invalid_argument("negative truncation order");
    }
    const ExtField* field_;
    int nvars_;
    int cutoff_;
};

/// A truncated polynomial: sparse exponent-vector map with nonzero
/// coefficients, total degree capped by the ring's cutoff.
class RingElem {
public:
    RingElem() : R_(nullptr) {}
    explicit RingElem(const TruncRing* R) : R_(R) {}

    const TruncRing& ring() const {
        if (!R_) throw std::logic_error("use of uninitialized ring element");
        return *R_;
    }
    const std::map<std::vector<int>, Fq>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    bool operator==(const RingElem& rhs) const {
        if (R_ != rhs.R_) throw std::invalid_argument("ring mismatch");
        return terms_ == rhs.terms_;
    }
    bool operator!=(const RingElem& rhs) const { return !(*this == rhs); }

    RingElem operator+(const RingElem& rhs) const {
        check(rhs);
        RingElem r(*this);
        for (const auto& [e, c] : rhs.terms_) r.add_term(e, c);
        return r;
    }
    RingElem operator-(const RingElem& rhs) const {
        check(rhs);
        RingElem r(*this);
        for (const auto& [e, c] : rhs.terms_) r.add_term(e, -c);
        return r;
    }
    RingElem operator-() const {
        RingElem r(*this);
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    RingElem operator*(const RingElem& rhs) const {
        check(rhs);
        RingElem r(R_);
        const int cutoff = ring().cutoff();
        for (const auto& [ea, ca] : terms_) {
            int da = 0;
            for (int v : ea) da += v;
            for (const auto& [eb, cb] : rhs.terms_) {
                int db = da;
                for (int v : eb) db += v;
                if (db > cutoff) continue;
                std::vector<int> e(ea);
                for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        }
        return r;
    }
    RingElem operator*(const Fq& c) const {
        RingElem r(R_);
        for (const auto& [e, v] : terms_) r.add_term(e, v * c);
        return r;
    }

    RingElem pow(int e) const {
        if (e < 0) throw std::invalid_argument("negative ring power");
        RingElem acc = ring().one();
        for (int i = 0; i < e; ++i) acc = acc * (*this);
        return acc;
    }

    /// Multiplicative inverse, defined when the constant term is a unit:
    /// geometric series up to the cutoff.
    RingElem inverse() const {
        Fq c0 = constant_term();
        if (c0.is_zero())
            throw std::invalid_argument("ring element is not a unit (zero constant term)");
        Fq c0i = c0.inverse();
        RingElem m = ring().one() - (*this) * c0i;  // nilpotent part
        RingElem acc = ring().one();
        RingElem pw = ring().one();
        for (int i = 1; i <= ring().cutoff(); ++i) {
            pw = pw * m;
            if (pw.is_zero()) break;
            acc = acc + pw;
        }
        return acc * c0i;
    }
    bool is_unit() const { return !constant_term().is_zero(); }

    Fq constant_term() const {
        std::vector<int> z(ring().nvars(), 0);
        auto it = terms_.find(z);
        return it == terms_.end() ? ring().field().zero() : it->second;
    }

    int degree() const {  // total degree, -1 for zero
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int t = 0;
            for (int v : e) t += v;
            d = std::max(d, t);
        }
        return d;
    }

    /// Formal partial derivative with respect to t_{i+1}.
    RingElem derivative(int i) const {
        if (i < 0 || i >= ring().nvars()) throw std::invalid_argument("variable index");
        RingElem r(R_);
        const ExtField& F = ring().field();
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Fq mult = F.from_int(e[i]);
            if (mult.is_zero()) continue;  // characteristic kills p-th powers
            std::vector<int> e2(e);
            --e2[i];
            r.add_term(e2, c * mult);
        }
        return r;
    }

    /// Re-embed into another ring with the same field and variables but a
    /// different cutoff (terms beyond the new cutoff are dropped).
    RingElem lift_to(const TruncRing& R2) const {
        if (!R2.field().same(ring().field()) || R2.nvars() != ring().nvars())
            throw std::invalid_argument("ring lift mismatch");
        RingElem r(&R2);
        for (const auto& [e, c] : terms_) {
            int d = 0;
            for (int v : e) d += v;
            if (d <= R2.cutoff()) r.add_term(e, c);
        }
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << c.str();
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                os << "*t" << (i + 1);
                if (e[i] > 1) os << "^" << e[i];
            }
        }
        return os.str();
    }

    void add_term(const std::vector<int>& expo, const Fq& c) {
        if (c.is_zero()) return;
        int d = 0;
        for (int v : expo) {
            if (v < 0) throw std::invalid_argument("negative exponent");
            d += v;
        }
        if (d > ring().cutoff()) return;
        auto it = terms_.find(expo);
        if (it == terms_.end()) {
            terms_.emplace(expo, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

private:
    void check(const RingElem& rhs) const {
        if (R_ != rhs.R_) throw std::invalid_argument("ring mismatch");
    }
    const TruncRing* R_;
    std::map<std::vector<int>, Fq> terms_;
};

inline RingElem TruncRing::zero() const { return RingElem(this); }
inline RingElem TruncRing::one() const { return constant(field().one()); }
inline RingElem TruncRing::constant(const Fq& c) const {
    RingElem r(this);
    r.add_term(std::vector<int>(nvars_, 0), c);
    return r;
}
inline RingElem TruncRing::var(int i) const {
    if (i < 0 || i >= nvars_) throw std::invalid_argument("variable index");
    RingElem r(this);
    std::vector<int> e(nvars_, 0);
    e[i] = 1;
    r.add_term(e, field().one());
    return r;
}

inline const TruncRing& TruncRing::get(const ExtField& F, int nvars, int cutoff) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<TruncRing>> registry;
    std::lock_guard<std::mutex> lock(mu);
    for (const auto& r : registry)
        if (&r->field() == &F && r->nvars() == nvars && r->cutoff() == cutoff) return *r;
    registry.push_back(std::unique_ptr<TruncRing>(new TruncRing(F, nvars, cutoff)));
    return *registry.back();
}

template <>
inline RingElem Matrix<RingElem>::one_from_context() const {
    return zero_.ring().one();
}

using RingMatrix = Matrix<RingElem>;

inline RingMatrix ring_matrix(const TruncRing& R, size_t rows, size_t cols) {
    return RingMatrix(rows, cols, R.zero());
}
inline RingMatrix ring_identity(const TruncRing& R, size_t n) {
    return RingMatrix::identity(n, R.zero(), R.one());
}

// --- differential forms over the truncated ring ---

/// A 1-form sum f_i dt_i.
struct OneForm {
    std::vector<RingElem> c;  // one coefficient per variable

    static OneForm zero(const TruncRing& R) {
        return OneForm{std::vector<RingElem>(R.nvars(), R.zero())};
    }
    bool is_zero() const {
        for (const auto& f : c)
            if (!f.is_zero()) return false;
        return true;
    }
    OneForm operator+(const OneForm& rhs) const {
        OneForm r(*this);
        for (size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] + rhs.c[i];
        return r;
    }
    OneForm operator-(const OneForm& rhs) const {
        OneForm r(*this);
        for (size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] - rhs.c[i];
        return r;
    }
    OneForm operator-() const {
        OneForm r(*this);
        for (auto& x : r.c) x = -x;
        return r;
    }
    OneForm operator*(const RingElem& f) const {
        OneForm r(*this);
        for (auto& x : r.c) x = x * f;
        return r;
    }
    bool operator==(const OneForm& rhs) const { return c == rhs.c; }
};

/// A 2-form sum g_{ij} dt_i ^ dt_j over i < j.
struct TwoForm {
    std::vector<RingElem> c;  // indexed over pairs i < j in lexicographic order

    static size_t pair_index(int i, int j, int d) {
        // i < j; position in the lex list of pairs
        return static_cast<size_t>(i * (2 * d - i - 1) / 2 + (j - i - 1));
    }
    static TwoForm zero(const TruncRing& R) {
        int d = R.nvars();
        return TwoForm{std::vector<RingElem>(static_cast<size_t>(d * (d - 1) / 2), R.zero())};
    }
    bool is_zero() const {
        for (const auto& f : c)
            if (!f.is_zero()) return false;
        return true;
    }
    TwoForm operator+(const TwoForm& rhs) const {
        TwoForm r(*this);
        for (size_t i = 0; i < c.size(); ++i) r.c[i] = r.c[i] + rhs.c[i];
        return r;
    }
};

/// Exterior differential R -> Omega^1.
inline OneForm exterior_d(const RingElem& f) {
    const TruncRing& R = f.ring();
    OneForm w = OneForm::zero(R);
    for (int i = 0; i < R.nvars(); ++i) w.c[i] = f.derivative(i);
    return w;
}

/// Exterior differential Omega^1 -> Omega^2.
inline TwoForm exterior_d(const OneForm& w, const TruncRing& R) {
    TwoForm out = TwoForm::zero(R);
    int d = R.nvars();
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            out.c[TwoForm::pair_index(i, j, d)] = w.c[j].derivative(i) - w.c[i].derivative(j);
    return out;
}

/// Wedge of two 1-forms.
inline TwoForm wedge(const OneForm& a, const OneForm& b, const TruncRing& R) {
    TwoForm out = TwoForm::zero(R);
    int d = R.nvars();
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            out.c[TwoForm::pair_index(i, j, d)] = a.c[i] * b.c[j] - a.c[j] * b.c[i];
    return out;
}

}  // namespace eotheta
