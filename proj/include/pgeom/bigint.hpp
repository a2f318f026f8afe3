#ifndef PGEOM_BIGINT_HPP
#define PGEOM_BIGINT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pgeom {

/// Arbitrary-precision signed integer, little-endian 32-bit limbs.
/// Coefficient arithmetic inside the polynomial engine can grow far past
/// 64 bits transiently (pseudo-remainder sequences), so exactness cannot
/// rely on machine words.
class BigInt {
public:
    BigInt() : sign_(0) {}
    BigInt(long long v);

    bool is_zero() const { return sign_ == 0; }
    bool is_one() const;
    int sign() const { return sign_; }

    BigInt operator-() const;
    BigInt abs() const;

    friend BigInt operator+(const BigInt& a, const BigInt& b);
    friend BigInt operator-(const BigInt& a, const BigInt& b);
    friend BigInt operator*(const BigInt& a, const BigInt& b);
    /// Truncated division; remainder carries the dividend's sign.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
    friend BigInt operator/(const BigInt& a, const BigInt& b);
    friend BigInt operator%(const BigInt& a, const BigInt& b);

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.sign_ == b.sign_ && a.mag_ == b.mag_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b);

    static BigInt gcd(const BigInt& a, const BigInt& b);

    int bit_length() const;
    double to_double() const;
    std::string str() const;

private:
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b);
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b);
    static std::vector<uint32_t> mul_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b);
    static void divmod_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                           std::vector<uint32_t>& q, std::vector<uint32_t>& r);
    void trim();

    int sign_;
    std::vector<uint32_t> mag_;
};

} // namespace pgeom

#endif
