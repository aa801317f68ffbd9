//! RSA groups, residues, and the exponentiation primitives built on them.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::montgomery::{ModRing, Montgomery};
use super::prime::{is_probable_prime, random_prime};
use crate::error::{Error, Result};

/// Modulus lengths accepted for production use.
pub const PRODUCTION_LAMBDAS: [u64; 4] = [1024, 2048, 3072, 4096];

/// Outcome of checking a modulus length for production use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaGrade {
    Recommended,
    /// Accepted, but needs frequent modulus refresh.
    Weak,
}

/// Refuses λ below 1024 and anything outside the supported set; warns at 1024.
pub fn validate_production_lambda(lambda: u64) -> Result<LambdaGrade> {
    if lambda < 1024 {
        return Err(Error::Config(format!(
            "modulus of {lambda} bits is too weak; use at least 2048"
        )));
    }
    if !PRODUCTION_LAMBDAS.contains(&lambda) {
        return Err(Error::Config(format!(
            "unsupported modulus length {lambda}; expected one of {PRODUCTION_LAMBDAS:?}"
        )));
    }
    if lambda == 1024 {
        log::warn!("1024-bit modulus offers about 80-bit security; refresh it often");
        return Ok(LambdaGrade::Weak);
    }
    Ok(LambdaGrade::Recommended)
}

/// The factorization of N. Only test setups keep it around.
#[derive(Clone, PartialEq, Eq)]
pub struct Trapdoor {
    pub p: BigUint,
    pub q: BigUint,
}

impl fmt::Debug for Trapdoor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Trapdoor(..)")
    }
}

struct GroupInner {
    modulus: BigUint,
    mont: Montgomery,
    trapdoor: Option<Trapdoor>,
}

/// Multiplicative group of integers modulo an odd N of λ bits.
///
/// Cheap to clone; all clones share one Montgomery context.
#[derive(Clone)]
pub struct RsaGroup {
    inner: Arc<GroupInner>,
}

impl fmt::Debug for RsaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RsaGroup")
            .field("lambda", &self.lambda())
            .field("trapdoor", &self.inner.trapdoor.is_some())
            .finish()
    }
}

impl PartialEq for RsaGroup {
    fn eq(&self, other: &Self) -> bool {
        self.inner.modulus == other.inner.modulus
    }
}

impl Eq for RsaGroup {}

impl RsaGroup {
    /// Public group from a modulus whose factorization is unknown to us.
    pub fn from_modulus(modulus: BigUint) -> Result<Self> {
        let mont = Montgomery::new(&modulus)
            .ok_or_else(|| Error::Parameter("modulus must be odd and at least 3".into()))?;
        Ok(Self {
            inner: Arc::new(GroupInner {
                modulus,
                mont,
                trapdoor: None,
            }),
        })
    }

    /// Test group that retains its factorization.
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self> {
        if p == q {
            return Err(Error::Parameter("p and q must differ".into()));
        }
        if !is_probable_prime(&p) || !is_probable_prime(&q) {
            return Err(Error::Parameter("p and q must both be prime".into()));
        }
        let modulus = &p * &q;
        let mut group = Self::from_modulus(modulus)?;
        Arc::get_mut(&mut group.inner).expect("fresh Arc").trapdoor = Some(Trapdoor { p, q });
        Ok(group)
    }

    /// Fresh modulus of exactly `lambda` bits from two random primes, keeping
    /// the trapdoor. `lambda` must be even and at least 32.
    pub fn generate<R: rand::Rng + ?Sized>(lambda: u64, rng: &mut R) -> Result<Self> {
        if lambda < 32 || lambda % 2 != 0 {
            return Err(Error::Parameter(format!(
                "cannot generate a {lambda}-bit modulus"
            )));
        }
        loop {
            let p = random_prime(lambda / 2, rng);
            let q = random_prime(lambda / 2, rng);
            if p != q {
                let group = Self::from_primes(p, q)?;
                debug_assert_eq!(group.lambda(), lambda);
                return Ok(group);
            }
        }
    }

    /// Same group with the factorization dropped.
    pub fn public(&self) -> Self {
        Self::from_modulus(self.inner.modulus.clone()).expect("valid modulus")
    }

    pub fn modulus(&self) -> &BigUint {
        &self.inner.modulus
    }

    /// Bit length of N.
    pub fn lambda(&self) -> u64 {
        self.inner.modulus.bits()
    }

    pub fn trapdoor(&self) -> Option<&Trapdoor> {
        self.inner.trapdoor.as_ref()
    }

    pub fn montgomery(&self) -> &Montgomery {
        &self.inner.mont
    }

    /// Wraps `value`, which must already be reduced.
    pub fn element(&self, value: BigUint) -> Result<GroupElement> {
        if value >= self.inner.modulus {
            return Err(Error::Parameter("value is not reduced modulo N".into()));
        }
        Ok(GroupElement {
            value,
            group: self.clone(),
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            value: BigUint::one(),
            group: self.clone(),
        }
    }

    /// Uniform element of `[0, N)`.
    pub fn random_element<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        GroupElement {
            value: rng.gen_biguint_below(&self.inner.modulus),
            group: self.clone(),
        }
    }

    /// Carmichael function λ(N) = lcm(p−1, q−1), when the trapdoor is known.
    pub fn carmichael(&self) -> Option<BigUint> {
        self.trapdoor()
            .map(|t| (&t.p - 1u32).lcm(&(&t.q - 1u32)))
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            modulus: self.inner.modulus.to_str_radix(16),
            p: self.trapdoor().map(|t| t.p.to_str_radix(16)),
            q: self.trapdoor().map(|t| t.q.to_str_radix(16)),
        }
    }

    pub fn from_file(file: &GroupFile) -> Result<Self> {
        let parse = |s: &str| {
            BigUint::parse_bytes(s.trim_start_matches("0x").as_bytes(), 16)
                .ok_or_else(|| Error::Config(format!("bad hex integer {s:?}")))
        };
        let modulus = parse(&file.modulus)?;
        match (&file.p, &file.q) {
            (Some(p), Some(q)) => {
                let group = Self::from_primes(parse(p)?, parse(q)?)?;
                if group.modulus() != &modulus {
                    return Err(Error::Config("p·q does not match the modulus".into()));
                }
                Ok(group)
            }
            (None, None) => Self::from_modulus(modulus),
            _ => Err(Error::Config("trapdoor needs both p and q".into())),
        }
    }
}

/// On-disk JSON form of a group: hex modulus and optional hex factors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub modulus: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
}

/// A residue in `[0, N)` tied to its group.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    value: BigUint,
    group: RsaGroup,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({:#x})", self.value)
    }
}

impl GroupElement {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn group(&self) -> &RsaGroup {
        &self.group
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            value: (&self.value * &other.value) % self.group.modulus(),
            group: self.group.clone(),
        }
    }
}

/// `base^exponent mod N` by square-and-multiply.
pub fn mod_exp(base: &GroupElement, exponent: &BigUint) -> GroupElement {
    let mont = base.group.montgomery();
    if exponent.is_zero() {
        return base.group.identity();
    }
    let r = mont.pow(&mont.import(&base.value), exponent);
    GroupElement {
        value: mont.export(&r),
        group: base.group.clone(),
    }
}

/// `x^{2^τ} mod N` by exactly τ dependent squarings. The second value is the
/// number of squarings performed.
pub fn sequential_square(x: &GroupElement, tau: u64) -> (GroupElement, u64) {
    let (y, _, count) = square_chain(x, tau, None);
    (y, count)
}

/// Squaring chain that also snapshots the running value every `stride`
/// squarings (including step 0). Snapshots add no squarings.
pub(crate) fn square_chain(
    x: &GroupElement,
    tau: u64,
    stride: Option<u64>,
) -> (GroupElement, Vec<GroupElement>, u64) {
    let group = &x.group;
    let mont = group.montgomery();
    let mut acc = mont.import(&x.value);
    let mut scratch = mont.scratch();
    let mut snapshots = Vec::new();
    let mut count = 0u64;
    if stride.is_some() {
        snapshots.push(x.clone());
    }
    for step in 1..=tau {
        mont.square_assign(&mut acc.0, &mut scratch);
        count += 1;
        if let Some(stride) = stride {
            if step % stride == 0 {
                snapshots.push(GroupElement {
                    value: mont.export(&acc),
                    group: group.clone(),
                });
            }
        }
    }
    let y = GroupElement {
        value: mont.export(&acc),
        group: group.clone(),
    };
    (y, snapshots, count)
}

/// Shortcut evaluation through the factorization: `x^{2^τ mod λ(N)}`.
///
/// Agrees with [`sequential_square`] whenever `gcd(x, N) = 1`; exists as a
/// test oracle only.
pub fn trapdoor_eval(x: &GroupElement, tau: u64) -> Result<GroupElement> {
    let carmichael = x
        .group
        .carmichael()
        .ok_or(Error::Unsupported("trapdoor evaluation needs the factorization"))?;
    let e = BigUint::from(2u32).modpow(&BigUint::from(tau), &carmichael);
    Ok(mod_exp(x, &e))
}
