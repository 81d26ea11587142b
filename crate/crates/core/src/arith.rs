//! Exact arithmetic in the prime field `F_p` and its quadratic extension
//! `F_{p^2} = F_p(sqrt(k))`.
//!
//! Residues are plain `u64` values in `[0, p)`; the [`Field`] context owns the
//! modulus and the fixed nonresidue `k` so every element of a given prime
//! shares the same extension. Products reduce by Barrett multiplication for
//! moduli below `2^32` and through `u128` otherwise, which is why the
//! modulus is capped below `2^63`.

use crate::factor::is_prime;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus {0} does not fit in 63 bits")]
    ModulusTooLarge(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}

/// The square roots of a residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Roots {
    /// Quadratic nonresidue.
    Empty,
    /// The residue was zero; its only root is zero.
    Zero,
    /// Two distinct roots `s < p - s`.
    Pair(u64, u64),
}

impl Roots {
    pub fn len(&self) -> usize {
        match self {
            Roots::Empty => 0,
            Roots::Zero => 1,
            Roots::Pair(..) => 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Roots::Empty)
    }

    pub fn contains(&self, x: u64) -> bool {
        match *self {
            Roots::Empty => false,
            Roots::Zero => x == 0,
            Roots::Pair(s, t) => x == s || x == t,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> {
        let (a, b) = match *self {
            Roots::Empty => (None, None),
            Roots::Zero => (Some(0), None),
            Roots::Pair(s, t) => (Some(s), Some(t)),
        };
        a.into_iter().chain(b)
    }
}

/// An element `re + im * sqrt(k)` of `F_{p^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct QuadExt {
    pub re: u64,
    pub im: u64,
}

impl QuadExt {
    pub const fn new(re: u64, im: u64) -> Self {
        QuadExt { re, im }
    }

    /// Embeds a base-field residue.
    pub const fn base(re: u64) -> Self {
        QuadExt { re, im: 0 }
    }

    pub fn is_base(&self) -> bool {
        self.im == 0
    }
}

/// Per-prime arithmetic context, immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u64,
    nonresidue: u64,
    // p - 1 = odd * 2^two_adicity
    odd: u64,
    two_adicity: u32,
    // nonresidue^odd, a generator of the 2-Sylow subgroup of F_p^*
    sylow_root: u64,
    // floor(2^64 / p) when p < 2^32, so products reduce without division
    barrett: u64,
}

impl Field {
    /// Builds the context for an odd prime `p < 2^63`.
    pub fn new(p: u64) -> Result<Self, ArithError> {
        if p >= 1 << 63 {
            return Err(ArithError::ModulusTooLarge(p));
        }
        if p < 3 || !is_prime(p) {
            return Err(ArithError::NotOddPrime(p));
        }
        let nonresidue = find_nonresidue(p);
        let two_adicity = (p - 1).trailing_zeros();
        let odd = (p - 1) >> two_adicity;
        let sylow_root = pow_mod(nonresidue, odd, p);
        Ok(Field {
            p,
            nonresidue,
            odd,
            two_adicity,
            sylow_root,
            barrett: if p < 1 << 32 { u64::MAX / p } else { 0 },
        })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// The fixed quadratic nonresidue `k` defining the extension.
    #[inline]
    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    /// Maps a signed integer to its residue.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.barrett != 0 {
            self.reduce_small(a * b)
        } else {
            ((a as u128 * b as u128) % self.p as u128) as u64
        }
    }

    // Barrett reduction of any u64 for p < 2^32; the quotient estimate is
    // at most one short.
    #[inline]
    fn reduce_small(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline]
    pub fn square(&self, a: u64) -> u64 {
        self.mul(a, a)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a % self.p, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, ArithError> {
        if a % self.p == 0 {
            return Err(ArithError::ZeroInverse);
        }
        Ok(inv_mod(a % self.p, self.p))
    }

    /// Inverts every entry in place with a single field inversion
    /// (Montgomery's trick). All entries must be nonzero.
    pub fn batch_inv(&self, xs: &mut [u64]) -> Result<(), ArithError> {
        let mut prefix = Vec::with_capacity(xs.len());
        let mut acc = 1;
        for &x in xs.iter() {
            prefix.push(acc);
            acc = self.mul(acc, x);
        }
        let mut inv = self.inv(acc)?;
        for (x, before) in xs.iter_mut().zip(prefix).rev() {
            let next = self.mul(inv, *x);
            *x = self.mul(inv, before);
            inv = next;
        }
        Ok(())
    }

    /// Halves a residue: `a * 2^{-1}`.
    #[inline]
    pub fn half(&self, a: u64) -> u64 {
        if a & 1 == 0 {
            a >> 1
        } else {
            // a + p is even and below 2^64
            (a + self.p) >> 1
        }
    }

    /// Legendre symbol as `-1`, `0` or `1`.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Square roots by Tonelli–Shanks.
    pub fn sqrt(&self, a: u64) -> Roots {
        let a = a % self.p;
        if a == 0 {
            return Roots::Zero;
        }
        if self.legendre(a) != 1 {
            return Roots::Empty;
        }
        let mut m = self.two_adicity;
        let mut c = self.sylow_root;
        let mut t = self.pow(a, self.odd);
        let mut r = self.pow(a, (self.odd + 1) / 2);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.square(t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.square(b);
            }
            m = i;
            c = self.square(b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        let s = r.min(self.p - r);
        Roots::Pair(s, self.p - s)
    }

    // ----- F_{p^2} -----

    #[inline]
    pub fn ext_add(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        QuadExt::new(self.add(x.re, y.re), self.add(x.im, y.im))
    }

    #[inline]
    pub fn ext_sub(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        QuadExt::new(self.sub(x.re, y.re), self.sub(x.im, y.im))
    }

    #[inline(always)]
    pub fn ext_mul(&self, x: QuadExt, y: QuadExt) -> QuadExt {
        if self.barrett != 0 {
            let ii = self.mul(x.im, y.im);
            let re = self.add(self.mul(x.re, y.re), self.mul(self.nonresidue, ii));
            let im = self.add(self.mul(x.re, y.im), self.mul(x.im, y.re));
            return QuadExt::new(re, im);
        }
        let p = self.p as u128;
        let k = self.nonresidue as u128;
        let ii = (x.im as u128 * y.im as u128) % p;
        let re = (x.re as u128 * y.re as u128 + k * ii) % p;
        let im = (x.re as u128 * y.im as u128 + x.im as u128 * y.re as u128) % p;
        QuadExt::new(re as u64, im as u64)
    }

    /// Multiplies by a base-field scalar.
    #[inline]
    pub fn ext_scale(&self, s: u64, x: QuadExt) -> QuadExt {
        QuadExt::new(self.mul(s, x.re), self.mul(s, x.im))
    }

    pub fn ext_pow(&self, x: QuadExt, mut e: u128) -> QuadExt {
        let mut base = x;
        let mut acc = QuadExt::base(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.ext_mul(acc, base);
            }
            base = self.ext_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `re^2 - k im^2`, the product of an element with its conjugate.
    #[inline]
    pub fn norm(&self, x: QuadExt) -> u64 {
        let k_im2 = self.mul(self.nonresidue, self.square(x.im));
        self.sub(self.square(x.re), k_im2)
    }

    /// The Frobenius map `x -> x^p`, i.e. conjugation `sqrt(k) -> -sqrt(k)`.
    #[inline]
    pub fn frobenius(&self, x: QuadExt) -> QuadExt {
        QuadExt::new(x.re, self.neg(x.im))
    }

    pub fn ext_inv(&self, x: QuadExt) -> Result<QuadExt, ArithError> {
        let n = self.norm(x);
        let n_inv = self.inv(n)?;
        Ok(self.ext_scale(n_inv, self.frobenius(x)))
    }
}

/// `a^e mod m` by square-and-multiply.
pub fn pow_mod(a: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut base = (a % m) as u128;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of a nonzero residue modulo `m` via the extended Euclidean algorithm.
/// `a` must be coprime to `m`.
pub fn inv_mod(a: u64, m: u64) -> u64 {
    if m < 1 << 63 {
        let (mut old_r, mut r) = (a as i64, m as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1, "{a} is not invertible mod {m}");
        return old_s.rem_euclid(m as i64) as u64;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "{a} is not invertible mod {m}");
    old_s.rem_euclid(m as i128) as u64
}

/// Smallest positive quadratic nonresidue modulo the odd prime `p`.
pub fn find_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&k| pow_mod(k, (p - 1) / 2, p) == p - 1)
        .expect("every odd prime has a quadratic nonresidue")
}
