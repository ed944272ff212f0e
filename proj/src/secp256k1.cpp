#include "embedkey/secp256k1.hpp"

namespace embedkey::ec {

const Modulus& field()
{
    static const Modulus m(kFieldPrime);
    return m;
}

const Modulus& group_order()
{
    static const Modulus m(kGroupOrder);
    return m;
}

const Point& generator()
{
    static const Point g{kGeneratorX, kGeneratorY, false};
    return g;
}

bool on_curve(const Point& p)
{
    if (p.infinity) return false;
    const Modulus& f = field();
    if (p.x >= f.value() || p.y >= f.value()) return false;
    U256 lhs = f.sqr(p.y);
    U256 rhs = f.add(f.mul(f.sqr(p.x), p.x), U256{kCurveB});
    return lhs == rhs;
}

namespace {

// Jacobian coordinates: (X, Y, Z) represents (X/Z^2, Y/Z^3); Z = 0 is infinity.
struct Jacobian {
    U256 x, y, z;

    bool is_infinity() const { return z.is_zero(); }
    static Jacobian from(const Point& p)
    {
        if (p.infinity) return Jacobian{{}, U256{1}, {}};
        return Jacobian{p.x, p.y, U256{1}};
    }
};

Point to_affine(const Jacobian& j)
{
    if (j.is_infinity()) return Point::at_infinity();
    const Modulus& f = field();
    U256 zinv = f.inv(j.z);
    U256 zinv2 = f.sqr(zinv);
    return Point{f.mul(j.x, zinv2), f.mul(j.y, f.mul(zinv2, zinv)), false};
}

// dbl-2009-l (a = 0).
Jacobian jdouble(const Jacobian& p)
{
    if (p.is_infinity() || p.y.is_zero()) return Jacobian{{}, U256{1}, {}};
    const Modulus& f = field();
    U256 a = f.sqr(p.x);
    U256 b = f.sqr(p.y);
    U256 c = f.sqr(b);
    U256 t = f.sub(f.sub(f.sqr(f.add(p.x, b)), a), c);
    U256 d = f.add(t, t);
    U256 e = f.add(f.add(a, a), a);
    U256 ff = f.sqr(e);
    Jacobian r;
    r.x = f.sub(ff, f.add(d, d));
    U256 c8 = f.add(c, c);
    c8 = f.add(c8, c8);
    c8 = f.add(c8, c8);
    r.y = f.sub(f.mul(e, f.sub(d, r.x)), c8);
    U256 yz = f.mul(p.y, p.z);
    r.z = f.add(yz, yz);
    return r;
}

// madd-2007-bl: Jacobian + affine.
Jacobian jadd_affine(const Jacobian& p, const Point& q)
{
    if (q.infinity) return p;
    if (p.is_infinity()) return Jacobian::from(q);
    const Modulus& f = field();
    U256 z1z1 = f.sqr(p.z);
    U256 u2 = f.mul(q.x, z1z1);
    U256 s2 = f.mul(q.y, f.mul(p.z, z1z1));
    U256 h = f.sub(u2, p.x);
    U256 rr = f.sub(s2, p.y);
    if (h.is_zero()) {
        if (rr.is_zero()) return jdouble(p);
        return Jacobian{{}, U256{1}, {}};
    }
    rr = f.add(rr, rr);
    U256 hh = f.sqr(h);
    U256 i = f.add(hh, hh);
    i = f.add(i, i);
    U256 j = f.mul(h, i);
    U256 v = f.mul(p.x, i);
    Jacobian r;
    r.x = f.sub(f.sub(f.sqr(rr), j), f.add(v, v));
    U256 y1j = f.mul(p.y, j);
    r.y = f.sub(f.mul(rr, f.sub(v, r.x)), f.add(y1j, y1j));
    r.z = f.sub(f.sub(f.sqr(f.add(p.z, h)), z1z1), hh);
    return r;
}

Jacobian jmul(const U256& k, const Point& p)
{
    Jacobian acc{{}, U256{1}, {}};
    for (int i = int(k.bit_length()) - 1; i >= 0; --i) {
        acc = jdouble(acc);
        if (k.bit(unsigned(i))) acc = jadd_affine(acc, p);
    }
    return acc;
}

} // namespace

Point add(const Point& a, const Point& b)
{
    return to_affine(jadd_affine(Jacobian::from(a), b));
}

Point dbl(const Point& a)
{
    return to_affine(jdouble(Jacobian::from(a)));
}

Point negate(const Point& a)
{
    if (a.infinity) return a;
    return Point{a.x, field().neg(a.y), false};
}

Point mul(const U256& k, const Point& p)
{
    return to_affine(jmul(k, p));
}

Point mul_add(const U256& a, const U256& b, const Point& p)
{
    Point bp = mul(b, p);
    return to_affine(jadd_affine(jmul(a, generator()), bp));
}

std::optional<Point> lift_x(const U256& x, bool y_odd)
{
    const Modulus& f = field();
    if (x >= f.value()) return std::nullopt;
    U256 rhs = f.add(f.mul(f.sqr(x), x), U256{kCurveB});
    // p = 3 (mod 4), so a square root is rhs^((p + 1) / 4).
    U256 exponent;
    add_carry(f.value(), U256{1}, exponent); // p + 1 < 2^256
    exponent = shr1(shr1(exponent));
    U256 y = f.pow(rhs, exponent);
    if (f.sqr(y) != rhs) return std::nullopt;
    if (y.is_odd() != y_odd) y = f.neg(y);
    return Point{x, y, false};
}

} // namespace embedkey::ec
