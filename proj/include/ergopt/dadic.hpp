#ifndef ERGOPT_DADIC_HPP
#define ERGOPT_DADIC_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergopt {

/// Truncated d-adic integer: digit sequence (i_1, ..., i_K) in base d,
/// least significant first, standing for i_1 + i_2 d + ... + i_K d^{K-1}
/// mod d^K. Exact small-integer arithmetic throughout; no floating point.
/// With carry addition these form the cyclic group Z / d^K Z, the depth-K
/// truncation of the compact group of all one-sided digit sequences.
class DadicInt {
public:
    DadicInt(int base, std::vector<int> digits)
        : base_(base), digits_(std::move(digits)) {
        if (base_ < 2) throw std::invalid_argument("DadicInt: base must be >= 2");
        if (digits_.empty()) throw std::invalid_argument("DadicInt: empty digits");
        for (int v : digits_)
            if (v < 0 || v >= base_)
                throw std::invalid_argument("DadicInt: digit out of [0, base)");
    }

    /// iota(m): the base-d digit expansion of m >= 0, truncated to depth K.
    static DadicInt iota(std::uint64_t m, int base, int depth) {
        if (base < 2) throw std::invalid_argument("iota: base must be >= 2");
        if (depth < 1) throw std::invalid_argument("iota: depth must be >= 1");
        std::vector<int> digits(static_cast<std::size_t>(depth), 0);
        const auto b = static_cast<std::uint64_t>(base);
        for (int n = 0; n < depth && m != 0; ++n) {
            digits[static_cast<std::size_t>(n)] = static_cast<int>(m % b);
            m /= b;
        }
        return DadicInt(base, std::move(digits));
    }

    static DadicInt zero(int base, int depth) { return iota(0, base, depth); }

    int base() const { return base_; }
    int depth() const { return static_cast<int>(digits_.size()); }
    const std::vector<int>& digits() const { return digits_; }

    /// 1-based digit access: digit(1) = i_1.
    int digit(int n) const {
        if (n < 1 || n > depth())
            throw std::out_of_range("DadicInt::digit: index out of range");
        return digits_[static_cast<std::size_t>(n - 1)];
    }

    bool is_zero() const {
        for (int v : digits_)
            if (v != 0) return false;
        return true;
    }

    /// Digit-wise sum with carry; value congruence mod d^n for every n <= K.
    DadicInt add(const DadicInt& other) const {
        check_compatible(other, "add");
        std::vector<int> out(digits_.size());
        int carry = 0;
        for (std::size_t n = 0; n < digits_.size(); ++n) {
            int s = digits_[n] + other.digits_[n] + carry;
            carry = s / base_;
            out[n] = s % base_;
        }
        return DadicInt(base_, std::move(out));
    }

    /// Additive inverse: add(a, neg(a)) = iota(0).
    DadicInt neg() const {
        std::vector<int> out(digits_.size(), 0);
        std::size_t p = 0;
        while (p < digits_.size() && digits_[p] == 0) ++p;
        if (p < digits_.size()) {
            out[p] = base_ - digits_[p];
            for (std::size_t n = p + 1; n < digits_.size(); ++n)
                out[n] = base_ - 1 - digits_[n];
        }
        return DadicInt(base_, std::move(out));
    }

    /// The odometer step a -> a + iota(1).
    DadicInt adding_machine() const { return add(iota(1, base_, depth())); }

    /// (k0, i_1, ..., i_{K-1}): shift digits right, dropping the last.
    DadicInt prepend(int k0) const {
        if (k0 < 0 || k0 >= base_)
            throw std::invalid_argument("prepend: digit out of [0, base)");
        std::vector<int> out(digits_.size());
        out[0] = k0;
        for (std::size_t n = 1; n < digits_.size(); ++n)
            out[n] = digits_[n - 1];
        return DadicInt(base_, std::move(out));
    }

    /// i_1 + i_2 d + ... + i_n d^{n-1} as a plain integer (test helper;
    /// requires d^n to fit in 64 bits).
    std::uint64_t value_prefix(int n) const {
        if (n < 0 || n > depth())
            throw std::out_of_range("value_prefix: n out of range");
        std::uint64_t v = 0;
        std::uint64_t pw = 1;
        for (int j = 0; j < n; ++j) {
            const std::uint64_t dig = static_cast<std::uint64_t>(
                digits_[static_cast<std::size_t>(j)]);
            if (pw != 0 && dig != 0 && dig > (UINT64_MAX - v) / pw)
                throw std::overflow_error("value_prefix: overflow");
            v += dig * pw;
            if (j + 1 < n) {
                if (pw > UINT64_MAX / static_cast<std::uint64_t>(base_))
                    throw std::overflow_error("value_prefix: overflow");
                pw *= static_cast<std::uint64_t>(base_);
            }
        }
        return v;
    }

    bool operator==(const DadicInt& other) const {
        return base_ == other.base_ && digits_ == other.digits_;
    }
    bool operator!=(const DadicInt& other) const { return !(*this == other); }

    /// Textual form "d:K:i1,i2,...,iK".
    std::string to_string() const {
        std::ostringstream os;
        os << base_ << ':' << depth() << ':';
        for (std::size_t n = 0; n < digits_.size(); ++n) {
            if (n) os << ',';
            os << digits_[n];
        }
        return os.str();
    }

    static DadicInt parse(const std::string& text) {
        std::istringstream is(text);
        int base = 0, depth = 0;
        char sep = 0;
        if (!(is >> base >> sep) || sep != ':' || !(is >> depth >> sep) || sep != ':')
            throw std::invalid_argument("DadicInt::parse: expected d:K:digits");
        std::vector<int> digits;
        digits.reserve(static_cast<std::size_t>(depth));
        int v = 0;
        while (is >> v) {
            digits.push_back(v);
            is >> sep;
        }
        if (static_cast<int>(digits.size()) != depth)
            throw std::invalid_argument("DadicInt::parse: digit count != K");
        return DadicInt(base, std::move(digits));
    }

private:
    void check_compatible(const DadicInt& other, const char* op) const {
        if (base_ != other.base_ || digits_.size() != other.digits_.size())
            throw std::invalid_argument(std::string("DadicInt::") + op +
                                        ": base/depth mismatch");
    }

    int base_;
    std::vector<int> digits_;
};

inline DadicInt add(const DadicInt& a, const DadicInt& b) { return a.add(b); }
inline DadicInt neg(const DadicInt& a) { return a.neg(); }
inline DadicInt adding_machine(const DadicInt& a) { return a.adding_machine(); }
inline DadicInt prepend(int k0, const DadicInt& a) { return a.prepend(k0); }
inline DadicInt iota(std::uint64_t m, int base, int depth) {
    return DadicInt::iota(m, base, depth);
}

}  // namespace ergopt

#endif
