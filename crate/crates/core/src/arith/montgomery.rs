//! Modular multiplication backends.
//!
//! [`ModRing`] abstracts "multiply two residues mod N" so the exponentiation
//! kernels can run over the fast [`Montgomery`] representation, over the
//! plain big-integer reference [`PlainModulus`], or under a [`Counting`]
//! wrapper that tallies every multiplication it forwards.

use std::cell::Cell;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A ring of residues modulo some N with a multiplication primitive.
pub trait ModRing {
    type Elem: Clone;

    fn one(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
    /// Maps an integer (reduced mod N first) into the ring representation.
    fn import(&self, v: &BigUint) -> Self::Elem;
    /// Maps a ring element back to its canonical residue in `[0, N)`.
    fn export(&self, e: &Self::Elem) -> BigUint;
}

/// Reference backend: `(a * b) % N` on `BigUint`.
#[derive(Clone, Debug)]
pub struct PlainModulus {
    modulus: BigUint,
}

impl PlainModulus {
    pub fn new(modulus: BigUint) -> Self {
        assert!(!modulus.is_zero(), "modulus must be non-zero");
        Self { modulus }
    }
}

impl ModRing for PlainModulus {
    type Elem = BigUint;

    fn one(&self) -> BigUint {
        BigUint::one() % &self.modulus
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }

    fn import(&self, v: &BigUint) -> BigUint {
        v % &self.modulus
    }

    fn export(&self, e: &BigUint) -> BigUint {
        e.clone()
    }
}

/// Forwards to an inner ring and counts multiplications and squarings.
pub struct Counting<'a, R> {
    inner: &'a R,
    mults: Cell<u64>,
    squares: Cell<u64>,
}

impl<'a, R: ModRing> Counting<'a, R> {
    pub fn new(inner: &'a R) -> Self {
        Self {
            inner,
            mults: Cell::new(0),
            squares: Cell::new(0),
        }
    }

    pub fn multiplications(&self) -> u64 {
        self.mults.get()
    }

    pub fn squarings(&self) -> u64 {
        self.squares.get()
    }

    pub fn total(&self) -> u64 {
        self.mults.get() + self.squares.get()
    }
}

impl<R: ModRing> ModRing for Counting<'_, R> {
    type Elem = R::Elem;

    fn one(&self) -> R::Elem {
        self.inner.one()
    }

    fn mul(&self, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.mults.set(self.mults.get() + 1);
        self.inner.mul(a, b)
    }

    fn square(&self, a: &R::Elem) -> R::Elem {
        self.squares.set(self.squares.get() + 1);
        self.inner.square(a)
    }

    fn import(&self, v: &BigUint) -> R::Elem {
        self.inner.import(v)
    }

    fn export(&self, e: &R::Elem) -> BigUint {
        self.inner.export(e)
    }
}

/// Element in Montgomery form: little-endian 64-bit limbs of `a·R mod N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MontElem(pub(crate) Vec<u64>);

/// Montgomery multiplication context for an odd modulus, `R = 2^{64·n}`.
#[derive(Clone, Debug)]
pub struct Montgomery {
    modulus: BigUint,
    limbs: Vec<u64>,
    /// `-N^{-1} mod 2^64`
    n0_inv: u64,
    r2: Vec<u64>,
    one: Vec<u64>,
}

impl Montgomery {
    /// Returns `None` for even or trivial moduli.
    pub fn new(modulus: &BigUint) -> Option<Self> {
        if modulus.is_zero() || !modulus.bit(0) || modulus.is_one() {
            return None;
        }
        let limbs = modulus.to_u64_digits();
        let n = limbs.len();

        // Newton iteration doubles the correct low bits each step.
        let n0 = limbs[0];
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n0.wrapping_mul(inv)));
        }
        debug_assert_eq!(n0.wrapping_mul(inv), 1);

        let r = BigUint::one() << (64 * n);
        let one = to_limbs(&(&r % modulus), n);
        let r2 = to_limbs(&((&r * &r) % modulus), n);
        Some(Self {
            modulus: modulus.clone(),
            limbs,
            n0_inv: inv.wrapping_neg(),
            r2,
            one,
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn limb_count(&self) -> usize {
        self.limbs.len()
    }

    /// Scratch buffer sized for [`Montgomery::mul_into`].
    pub fn scratch(&self) -> Vec<u64> {
        vec![0u64; self.limbs.len() + 2]
    }

    /// CIOS Montgomery product `a·b·R^{-1} mod N`, written to `t[..n]`.
    ///
    /// Inputs must be reduced limb vectors of length n; `t` needs n+2 limbs.
    #[inline]
    pub fn mul_into(&self, a: &[u64], b: &[u64], t: &mut [u64]) {
        let n = self.limbs.len();
        let m_limbs = &self.limbs;
        debug_assert!(a.len() == n && b.len() == n && t.len() >= n + 2);
        t[..n + 2].fill(0);

        for &bi in b.iter().take(n) {
            let bi = bi as u128;
            let mut carry: u128 = 0;
            for j in 0..n {
                let s = t[j] as u128 + (a[j] as u128) * bi + carry;
                t[j] = s as u64;
                carry = s >> 64;
            }
            let s = t[n] as u128 + carry;
            t[n] = s as u64;
            t[n + 1] = (s >> 64) as u64;

            let m = t[0].wrapping_mul(self.n0_inv) as u128;
            let s = t[0] as u128 + m * (m_limbs[0] as u128);
            let mut carry = s >> 64;
            for j in 1..n {
                let s = t[j] as u128 + m * (m_limbs[j] as u128) + carry;
                t[j - 1] = s as u64;
                carry = s >> 64;
            }
            let s = t[n] as u128 + carry;
            t[n - 1] = s as u64;
            t[n] = t[n + 1] + (s >> 64) as u64;
        }

        if t[n] != 0 || !less_than(&t[..n], m_limbs) {
            let mut borrow = 0u64;
            for j in 0..n {
                let (d1, b1) = t[j].overflowing_sub(m_limbs[j]);
                let (d2, b2) = d1.overflowing_sub(borrow);
                t[j] = d2;
                borrow = (b1 | b2) as u64;
            }
            t[n] = t[n].wrapping_sub(borrow);
        }
    }

    /// In-place squaring using a caller-provided scratch buffer.
    #[inline]
    pub fn square_assign(&self, a: &mut [u64], scratch: &mut [u64]) {
        let n = self.limbs.len();
        self.mul_into(a, a, scratch);
        a.copy_from_slice(&scratch[..n]);
    }

    /// In-place `a ← a·b`.
    #[inline]
    pub fn mul_assign(&self, a: &mut [u64], b: &[u64], scratch: &mut [u64]) {
        let n = self.limbs.len();
        self.mul_into(a, b, scratch);
        a.copy_from_slice(&scratch[..n]);
    }

    /// Left-to-right binary exponentiation in Montgomery form.
    pub fn pow(&self, base: &MontElem, exponent: &BigUint) -> MontElem {
        let mut acc = self.one.clone();
        let mut scratch = self.scratch();
        let bits = exponent.bits();
        for i in (0..bits).rev() {
            self.square_assign(&mut acc, &mut scratch);
            if exponent.bit(i) {
                self.mul_assign(&mut acc, &base.0, &mut scratch);
            }
        }
        MontElem(acc)
    }

    pub fn one_elem(&self) -> MontElem {
        MontElem(self.one.clone())
    }
}

impl ModRing for Montgomery {
    type Elem = MontElem;

    fn one(&self) -> MontElem {
        self.one_elem()
    }

    fn mul(&self, a: &MontElem, b: &MontElem) -> MontElem {
        let mut t = self.scratch();
        self.mul_into(&a.0, &b.0, &mut t);
        t.truncate(self.limbs.len());
        MontElem(t)
    }

    fn import(&self, v: &BigUint) -> MontElem {
        let n = self.limbs.len();
        let reduced = to_limbs(&(v % &self.modulus), n);
        let mut t = self.scratch();
        self.mul_into(&reduced, &self.r2, &mut t);
        t.truncate(n);
        MontElem(t)
    }

    fn export(&self, e: &MontElem) -> BigUint {
        let n = self.limbs.len();
        let mut unit = vec![0u64; n];
        unit[0] = 1;
        let mut t = self.scratch();
        self.mul_into(&e.0, &unit, &mut t);
        from_limbs(&t[..n])
    }
}

fn less_than(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x < y;
        }
    }
    false
}

pub(crate) fn to_limbs(v: &BigUint, n: usize) -> Vec<u64> {
    let mut limbs = v.to_u64_digits();
    debug_assert!(limbs.len() <= n);
    limbs.resize(n, 0);
    limbs
}

pub(crate) fn from_limbs(limbs: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(limbs.len() * 8);
    for l in limbs {
        bytes.extend_from_slice(&l.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}
