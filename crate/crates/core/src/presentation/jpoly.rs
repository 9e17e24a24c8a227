//! One-variable polynomials over `J = Z[d_q, d]` and the Chebyshev/Dickson
//! families built from them.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::charring::Character;
use crate::exec::Exec;
use crate::serde_int::IntRepr;

/// Exponents `(ω, d_q, d)`. The main variable is called `ω`; the
/// `υ`-polynomials `Q_r`, `h` use the same slot.
pub type JExp = (u32, u32, u32);

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JPoly {
    terms: BTreeMap<JExp, BigInt>,
}

impl JPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::term((0, 0, 0), c)
    }

    pub fn term(e: JExp, c: BigInt) -> Self {
        let mut out = Self::zero();
        out.add_term(e, c);
        out
    }

    pub fn omega() -> Self {
        Self::term((1, 0, 0), BigInt::one())
    }

    pub fn dq() -> Self {
        Self::term((0, 1, 0), BigInt::one())
    }

    pub fn d() -> Self {
        Self::term((0, 0, 1), BigInt::one())
    }

    pub fn add_term(&mut self, e: JExp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(e).or_insert_with(BigInt::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: JExp) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JExp, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in the main variable; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.0).max()
    }

    /// Coefficient of `ω^k`, as a polynomial in `d_q, d` (main degree 0).
    pub fn coeff_of(&self, k: u32) -> JPoly {
        self.terms
            .iter()
            .filter(|(e, _)| e.0 == k)
            .map(|(&(_, i, j), c)| ((0, i, j), c.clone()))
            .collect()
    }

    pub fn scalar(&self, k: &BigInt) -> Self {
        self.terms.iter().map(|(e, c)| (*e, c * k)).collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Formal derivative in the main variable.
    pub fn derivative(&self) -> Self {
        self.terms
            .iter()
            .filter(|(e, _)| e.0 > 0)
            .map(|(&(w, i, j), c)| ((w - 1, i, j), c * BigInt::from(w)))
            .collect()
    }

    /// Substitute an integer for the main variable.
    pub fn eval_main(&self, b: &BigInt) -> JPoly {
        self.terms
            .iter()
            .map(|(&(w, i, j), c)| ((0, i, j), c * b.pow(w)))
            .collect()
    }

    /// Evaluate in `F_q` at `(ω, d_q, d)`.
    pub fn eval_mod(&self, q: u64, omega: u64, dq: u64, d: u64) -> u64 {
        let qq = BigInt::from(q);
        let mut acc = 0u64;
        for (&(w, i, j), c) in &self.terms {
            let c = c.mod_floor(&qq).to_u64().unwrap();
            let t = mulmod(
                mulmod(
                    mulmod(c, powmod(omega, w as u64, q), q),
                    powmod(dq, i as u64, q),
                    q,
                ),
                powmod(d, j as u64, q),
                q,
            );
            acc = (acc + t) % q;
        }
        acc
    }

    /// Image under `ω ↦ t1 + t2` and `d_q, d ↦ t1 t2`.
    pub fn bridge(&self) -> Character {
        let omega = &Character::exp((1, 0).into()) + &Character::exp((0, 1).into());
        let det = Character::exp((1, 1).into());
        let mut out = Character::zero();
        for (&(w, i, j), c) in &self.terms {
            out += &(&omega.pow(w) * &det.pow(i + j)).scalar(c);
        }
        out
    }
}

pub(crate) fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1 % q;
    a %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, q);
        }
        a = mulmod(a, a, q);
        e >>= 1;
    }
    r
}

impl FromIterator<(JExp, BigInt)> for JPoly {
    fn from_iter<I: IntoIterator<Item = (JExp, BigInt)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in iter {
            out.add_term(e, c);
        }
        out
    }
}

impl Add for &JPoly {
    type Output = JPoly;
    fn add(self, o: &JPoly) -> JPoly {
        self.terms
            .iter()
            .chain(o.terms.iter())
            .map(|(e, c)| (*e, c.clone()))
            .collect()
    }
}

impl Sub for &JPoly {
    type Output = JPoly;
    fn sub(self, o: &JPoly) -> JPoly {
        self + &-o
    }
}

impl Neg for &JPoly {
    type Output = JPoly;
    fn neg(self) -> JPoly {
        self.terms.iter().map(|(e, c)| (*e, -c)).collect()
    }
}

impl Mul for &JPoly {
    type Output = JPoly;
    fn mul(self, o: &JPoly) -> JPoly {
        let mut out = JPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add_term((a.0 + b.0, a.1 + b.1, a.2 + b.2), x * y);
            }
        }
        out
    }
}

impl std::fmt::Display for JPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(w, i, j), c)) in self.terms.iter().rev().enumerate() {
            let neg = c.sign() == num_bigint::Sign::Minus;
            let abs = if neg { -c } else { c.clone() };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            for (name, e) in [("w", w), ("dq", i), ("d", j)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            if parts.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", parts.join("*"))?;
            } else {
                write!(f, "{abs}*{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Serialize for JPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(
            self.terms
                .iter()
                .map(|(&(w, i, j), c)| (w, i, j, IntRepr::from(c))),
        )
    }
}

impl<'de> Deserialize<'de> for JPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(u32, u32, u32, IntRepr)> = Vec::deserialize(d)?;
        let mut out = JPoly::zero();
        for (w, i, j, c) in raw {
            out.add_term((w, i, j), c.into_bigint()?);
        }
        Ok(out)
    }
}

/// `F_{r+1} = ω F_r - det F_{r-1}` from `F_0 = a0`, `F_1 = ω`.
fn three_term(r: u32, a0: JPoly, det: &JPoly) -> JPoly {
    let omega = JPoly::omega();
    let (mut prev, mut cur) = (a0, omega.clone());
    if r == 0 {
        return prev;
    }
    for _ in 1..r {
        let next = &(&omega * &cur) - &(det * &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `P_0 = 1`, `P_1 = ω`, `P_{r+1} = ω P_r - d_q P_{r-1}`.
pub fn cheb_p(r: u32) -> JPoly {
    three_term(r, JPoly::one(), &JPoly::dq())
}

/// `Q_r`: the same recursion in `υ` with `d` in place of `d_q`.
pub fn cheb_q(r: u32) -> JPoly {
    three_term(r, JPoly::one(), &JPoly::d())
}

/// `g` with `g(t1 + t2) = t1^ℓ + t2^ℓ` under `d_q = t1 t2`.
pub fn dickson_g(ell: u32) -> JPoly {
    three_term(ell, JPoly::constant(BigInt::from(2)), &JPoly::dq())
}

/// `h` with `h(u1 + u2) = u1^p + u2^p` under `d = u1 u2`.
pub fn dickson_h(p: u32) -> JPoly {
    three_term(p, JPoly::constant(BigInt::from(2)), &JPoly::d())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitiesReport {
    pub l: i64,
    pub p: i64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// The four derivative/product identities between `g, h, P, Q`.
///
/// Only `ℓ, p >= 1` are needed; primality and coprimality play no role.
pub fn verify_identities(ell: u32, p: u32) -> IdentitiesReport {
    let (g, h) = (dickson_g(ell), dickson_h(p));
    let (pl, qp) = (cheb_p(ell - 1), cheb_q(p - 1));
    let checks = vec![
        Check {
            name: "g' = l*P_{l-1}".into(),
            pass: g.derivative() == pl.scalar(&BigInt::from(ell)),
        },
        Check {
            name: "h' = p*Q_{p-1}".into(),
            pass: h.derivative() == qp.scalar(&BigInt::from(p)),
        },
        Check {
            name: "P_{2l-1} = g*P_{l-1}".into(),
            pass: cheb_p(2 * ell - 1) == &g * &pl,
        },
        Check {
            name: "Q_{2p-1} = h*Q_{p-1}".into(),
            pass: cheb_q(2 * p - 1) == &h * &qp,
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    IdentitiesReport {
        l: ell as i64,
        p: p as i64,
        checks,
        pass,
    }
}

/// [`verify_identities`] over every cell `(ℓ, p)` of `ells × ps`, row-major.
pub fn verify_identities_grid(ells: &[u32], ps: &[u32], exec: Exec) -> Vec<IdentitiesReport> {
    let cells: Vec<(u32, u32)> = ells
        .iter()
        .flat_map(|&l| ps.iter().map(move |&p| (l, p)))
        .collect();
    exec.map(&cells, |&(l, p)| verify_identities(l, p))
}
