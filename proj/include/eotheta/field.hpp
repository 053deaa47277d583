// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eotheta {

/// Arithmetic of the finite field F_{p^k}, realized as F_p[x]/(modulus).
///
/// Field descriptors are interned: ExtField::get returns a reference with
/// program lifetime, so elements can hold a plain pointer to their field.
/// All element values are immutable after construction and every operation
/// is pure.
class ExtField;

/// An element of F_{p^k}: a reduced coefficient vector c_0 + c_1 x + ... of
/// length k, together with the field it belongs to.
class Fq {
public:
    Fq() : field_(nullptr) {}
    Fq(const ExtField* field, std::vector<int64_t> coeffs)
        : field_(field), c_(std::move(coeffs)) {}

    const ExtField& field() const {
        if (!field_) throw std::logic_error("use of uninitialized field element");
        return *field_;
    }
    const std::vector<int64_t>& coeffs() const { return c_; }

    bool is_zero() const {
        for (int64_t v : c_)
            if (v != 0) return false;
        return true;
    }

    bool operator==(const Fq& rhs) const;
    bool operator!=(const Fq& rhs) const { return !(*this == rhs); }
    bool operator<(const Fq& rhs) const { return c_ < rhs.c_; }  // basis order, for maps

    Fq operator+(const Fq& rhs) const;
    Fq operator-(const Fq& rhs) const;
    Fq operator-() const;
    Fq operator*(const Fq& rhs) const;
    Fq operator/(const Fq& rhs) const;

    Fq& operator+=(const Fq& rhs) { return *this = *this + rhs; }
    Fq& operator-=(const Fq& rhs) { return *this = *this - rhs; }
    Fq& operator*=(const Fq& rhs) { return *this = *this * rhs; }
    Fq& operator/=(const Fq& rhs) { return *this = *this / rhs; }

    Fq inverse() const;
    Fq pow(int64_t e) const;

    /// x ^ (p^a); a may be negative (sigma has order k).
    Fq frobenius(int64_t a) const;

    std::string str() const;

private:
    const ExtField* field_;
    std::vector<int64_t> c_;
    friend class ExtField;
};

class ExtField {
public:
    /// Intern a field with the default modulus table (p <= 13, k <= 4).
    static const ExtField& get(int64_t p, int k);
    /// Intern a field with a user-supplied monic irreducible modulus
    /// (coefficients ascending, length k+1).
    static const ExtField& get(int64_t p, int k, const std::vector<int64_t>& modulus);

    int64_t p() const { return p_; }
    int k() const { return k_; }
    int64_t q() const { return q_; }
    const std::vector<int64_t>& modulus() const { return modulus_; }

    Fq zero() const { return Fq(this, std::vector<int64_t>(k_, 0)); }
    Fq one() const { return from_int(1); }
    Fq from_int(int64_t v) const {
        std::vector<int64_t> c(k_, 0);
        c[0] = mod(v);
        return Fq(this, c);
    }
    /// Element from coefficient vector (any length <= k after reduction mod p).
    Fq from_coeffs(const std::vector<int64_t>& coeffs) const {
        if (static_cast<int>(coeffs.size()) > k_)
            throw std::invalid_argument("coefficient vector longer than extension degree");
        std::vector<int64_t> c(k_, 0);
        for (size_t i = 0; i < coeffs.size(); ++i) c[i] = mod(coeffs[i]);
        return Fq(this, c);
    }
    /// The class of x, a generator of the extension over F_p (k >= 2).
    Fq gen() const {
        std::vector<int64_t> c(k_, 0);
        if (k_ >= 2) c[1] = 1;
        else c[0] = mod(primitive_root_mod_p(p_));
        return Fq(this, c);
    }
    /// Element whose index in the lexicographic-by-coefficients enumeration is i
    /// (i in [0, q)); used by exhaustive loops.
    Fq element(int64_t i) const {
        std::vector<int64_t> c(k_, 0);
        for (int j = 0; j < k_; ++j) {
            c[j] = i % p_;
            i /= p_;
        }
        return Fq(this, c);
    }

    bool same(const ExtField& other) const { return this == &other; }

    // --- element arithmetic (operators on Fq delegate here) ---
    Fq add(const Fq& a, const Fq& b) const {
        check(a); check(b);
        std::vector<int64_t> c(k_);
        for (int i = 0; i < k_; ++i) c[i] = mod(a.c_[i] + b.c_[i]);
        return Fq(this, c);
    }
    Fq sub(const Fq& a, const Fq& b) const {
        check(a); check(b);
        std::vector<int64_t> c(k_);
        for (int i = 0; i < k_; ++i) c[i] = mod(a.c_[i] - b.c_[i]);
        return Fq(this, c);
    }
    Fq neg(const Fq& a) const {
        check(a);
        std::vector<int64_t> c(k_);
        for (int i = 0; i < k_; ++i) c[i] = mod(-a.c_[i]);
        return Fq(this, c);
    }
    Fq mul(const Fq& a, const Fq& b) const {
        check(a); check(b);
        std::vector<int64_t> prod(2 * k_ - 1, 0);
        for (int i = 0; i < k_; ++i) {
            if (a.c_[i] == 0) continue;
            for (int j = 0; j < k_; ++j) prod[i + j] = mod(prod[i + j] + a.c_[i] * b.c_[j]);
        }
        reduce(prod);
        prod.resize(k_);
        return Fq(this, prod);
    }
    Fq inv(const Fq& a) const {
        check(a);
        if (a.is_zero()) throw std::invalid_argument("division by zero in F_q");
        return pow(a, q_ - 2);
    }
    Fq pow(Fq base, int64_t e) const {
        check(base);
        int64_t m = q_ - 1;
        if (base.is_zero()) {
            if (e < 0) throw std::invalid_argument("division by zero in F_q");
            return e == 0 ? one() : zero();
        }
        e %= m;
        if (e < 0) e += m;
        Fq acc = one();
        while (e) {
            if (e & 1) acc = mul(acc, base);
            base = mul(base, base);
            e >>= 1;
        }
        return acc;
    }
    Fq frobenius(const Fq& a, int64_t twist) const {
        check(a);
        int64_t e = twist % k_;
        if (e < 0) e += k_;
        Fq r = a;
        for (int64_t i = 0; i < e; ++i) r = pow(r, p_);
        return r;
    }

    std::string str(const Fq& a) const {
        std::ostringstream os;
        if (k_ == 1) {
            os << a.c_[0];
            return os.str();
        }
        os << "[";
        for (int i = 0; i < k_; ++i) os << (i ? "," : "") << a.c_[i];
        os << "]";
        return os.str();
    }

private:
    ExtField(int64_t p, int k, std::vector<int64_t> modulus);

    int64_t mod(int64_t v) const {
        v %= p_;
        return v < 0 ? v + p_ : v;
    }
    void check(const Fq& a) const {
        if (a.field_ != this) throw std::invalid_argument("field mismatch between elements");
    }
    // Reduce a coefficient vector in place modulo the (monic) modulus.
    void reduce(std::vector<int64_t>& c) const {
        for (int d = static_cast<int>(c.size()) - 1; d >= k_; --d) {
            int64_t lead = c[d];
            if (lead == 0) continue;
            c[d] = 0;
            for (int i = 0; i < k_; ++i) c[d - k_ + i] = mod(c[d - k_ + i] - lead * modulus_[i]);
        }
        c.resize(std::max<size_t>(c.size(), k_));
    }

    static bool is_prime(int64_t n) {
        if (n < 2) return false;
        for (int64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }
    static int64_t primitive_root_mod_p(int64_t p);
    static std::vector<int64_t> default_modulus(int64_t p, int k);
    static void verify_irreducible(int64_t p, const std::vector<int64_t>& f);

    int64_t p_;
    int k_;
    int64_t q_;
    std::vector<int64_t> modulus_;  // length k+1, monic
};

// --- Fq operator definitions ---

inline bool Fq::operator==(const Fq& rhs) const {
    if (field_ != rhs.field_) throw std::invalid_argument("field mismatch between elements");
    return c_ == rhs.c_;
}
inline Fq Fq::operator+(const Fq& rhs) const { return field().add(*this, rhs); }
inline Fq Fq::operator-(const Fq& rhs) const { return field().sub(*this, rhs); }
inline Fq Fq::operator-() const { return field().neg(*this); }
inline Fq Fq::operator*(const Fq& rhs) const { return field().mul(*this, rhs); }
inline Fq Fq::operator/(const Fq& rhs) const { return field().mul(*this, field().inv(rhs)); }
inline Fq Fq::inverse() const { return field().inv(*this); }
inline Fq Fq::pow(int64_t e) const { return field().pow(*this, e); }
inline Fq Fq::frobenius(int64_t a) const { return field().frobenius(*this, a); }
inline std::string Fq::str() const { return field().str(*this); }

/// sigma^a applied to a single element; the sigma of all semilinear maps.
inline Fq frobenius(const Fq& x, int64_t a) { return x.frobenius(a); }

// --- ExtField implementation ---

namespace detail {
// polynomial helpers over F_p (coefficients ascending)
inline void poly_trim(std::vector<int64_t>& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
inline std::vector<int64_t> poly_mulmod(const std::vector<int64_t>& a, const std::vector<int64_t>& b,
                                        const std::vector<int64_t>& f, int64_t p) {
    const int k = static_cast<int>(f.size()) - 1;
    std::vector<int64_t> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    for (int d = static_cast<int>(r.size()) - 1; d >= k; --d) {
        int64_t lead = r[d] % p;
        if (!lead) continue;
        r[d] = 0;
        for (int i = 0; i < k; ++i) {
            r[d - k + i] = ((r[d - k + i] - lead * f[i]) % p + p) % p;
        }
    }
    r.resize(k);
    return r;
}
inline std::vector<int64_t> poly_gcd(std::vector<int64_t> a, std::vector<int64_t> b, int64_t p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        // a mod b
        int db = static_cast<int>(b.size()) - 1;
        int64_t lead_inv = 1;
        {  // inverse of b's leading coefficient mod p
            int64_t l = ((b[db] % p) + p) % p, acc = 1, base = l, e = p - 2;
            while (e) {
                if (e & 1) acc = acc * base % p;
                base = base * base % p;
                e >>= 1;
            }
            lead_inv = acc;
        }
        while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
            int da = static_cast<int>(a.size()) - 1;
            int64_t c = a[da] % p * lead_inv % p;
            if (c) {
                for (int i = 0; i <= db; ++i)
                    a[da - db + i] = ((a[da - db + i] - c * b[i]) % p + p) % p;
            }
            poly_trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}
}  // namespace detail

inline int64_t ExtField::primitive_root_mod_p(int64_t p) {
    if (p == 2) return 1;
    for (int64_t g = 2; g < p; ++g) {
        bool ok = true;
        for (int64_t d = 1; d < p - 1 && ok; ++d) {
            // g has order p-1 iff g^d != 1 for all proper divisors d of p-1
            if ((p - 1) % d == 0) {
                int64_t acc = 1;
                for (int64_t i = 0; i < d; ++i) acc = acc * g % p;
                if (d < p - 1 && acc == 1) ok = false;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("no primitive root found");
}

inline std::vector<int64_t> ExtField::default_modulus(int64_t p, int k) {
    // Conway-style defaults, coefficients ascending, monic.
    struct Entry { int64_t p; int k; std::vector<int64_t> m; };
    static const std::vector<Entry> table = {
        {2, 2, {1, 1, 1}},      {2, 3, {1, 1, 0, 1}},     {2, 4, {1, 1, 0, 0, 1}},
        {3, 2, {2, 2, 1}},      {3, 3, {1, 2, 0, 1}},     {3, 4, {2, 0, 0, 2, 1}},
        {5, 2, {2, 4, 1}},      {5, 3, {3, 3, 0, 1}},     {5, 4, {2, 4, 4, 0, 1}},
        {7, 2, {3, 6, 1}},      {7, 3, {4, 0, 6, 1}},     {7, 4, {3, 4, 5, 0, 1}},
        {11, 2, {2, 7, 1}},     {11, 3, {9, 2, 0, 1}},    {11, 4, {2, 10, 8, 0, 1}},
        {13, 2, {2, 12, 1}},    {13, 3, {11, 2, 0, 1}},   {13, 4, {2, 0, 0, 0, 1}},
    };
    if (k == 1) {
        // F_p itself; modulus x - g with g the least primitive root, so that
        // gen() prints a generator of the multiplicative group.
        return {((-primitive_root_mod_p(p)) % p + p) % p, 1};
    }
    for (const auto& e : table)
        if (e.p == p && e.k == k) return e.m;
    throw std::invalid_argument("no default modulus for (p,k)=(" + std::to_string(p) + "," +
                                std::to_string(k) + "); supply one explicitly");
}

inline void ExtField::verify_irreducible(int64_t p, const std::vector<int64_t>& f) {
    const int k = static_cast<int>(f.size()) - 1;
    if (k < 1 || f[k] != 1) throw std::invalid_argument("modulus must be monic of degree >= 1");
    if (k == 1) return;
    // f is irreducible iff it has no irreducible factor of degree d <= k/2,
    // i.e. gcd(f, x^{p^d} - x) = 1 for d = 1..k/2 (d=1 covers absence of roots).
    std::vector<int64_t> xq = {0, 1};  // x
    for (int d = 1; d <= k / 2; ++d) {
        // raise to the p-th power once per step: xq = xq^p mod f
        std::vector<int64_t> acc = {1};
        std::vector<int64_t> base = xq;
        int64_t e = p;
        while (e) {
            if (e & 1) acc = detail::poly_mulmod(acc, base, f, p);
            base = detail::poly_mulmod(base, base, f, p);
            e >>= 1;
        }
        xq = acc;
        std::vector<int64_t> diff = xq;
        if (diff.size() < 2) diff.resize(2, 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;  // x^{p^d} - x
        auto g = detail::poly_gcd(f, diff, p);
        if (static_cast<int>(g.size()) > 1)
            throw std::invalid_argument("modulus is reducible over F_p (factor of degree <= " +
                                        std::to_string(d) + ")");
    }
}

inline ExtField::ExtField(int64_t p, int k, std::vector<int64_t> modulus)
    : p_(p), k_(k), modulus_(std::move(modulus)) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (k < 1) throw std::invalid_argument("extension degree must be >= 1");
    q_ = 1;
    for (int i = 0; i < k; ++i) {
        q_ *= p;
        if (q_ > 100000) throw std::invalid_argument("field size p^k beyond supported scale");
    }
    if (static_cast<int>(modulus_.size()) != k + 1)
        throw std::invalid_argument("modulus must have length k+1");
    for (auto& c : modulus_) c = ((c % p) + p) % p;
    verify_irreducible(p, modulus_);
}

inline const ExtField& ExtField::get(int64_t p, int k, const std::vector<int64_t>& modulus) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<ExtField>> registry;
    std::lock_guard<std::mutex> lock(mu);
    std::vector<int64_t> norm = modulus;
    for (auto& c : norm) c = ((c % p) + p) % p;
    for (const auto& f : registry)
        if (f->p_ == p && f->k_ == k && f->modulus_ == norm) return *f;
    registry.push_back(std::unique_ptr<ExtField>(new ExtField(p, k, norm)));
    return *registry.back();
}

inline const ExtField& ExtField::get(int64_t p, int k) {
    return get(p, k, default_modulus(p, k));
}

}  // namespace eotheta
