//! Characters in `Z[t1^±, t2^±]` and the character formulas for simple,
//! Weyl and tilting modules of quantum `GL_2` and its Frobenius twists.
//!
//! `t1 = e(ε1)`, `t2 = e(ε2)`; the quantum determinant is `t1 t2`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{in_restricted, Moduli, Params, TwistLabel, Weight};
use crate::serde_int::IntRepr;

/// Finitely supported integer combination of monomials `t1^i t2^j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Character {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl Character {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigInt::one())
    }

    pub fn monomial(i: i64, j: i64, c: BigInt) -> Self {
        let mut out = Self::zero();
        out.add_term(i, j, c);
        out
    }

    /// `e(w) = t1^a t2^b`.
    pub fn exp(w: Weight) -> Self {
        Self::monomial(w.a, w.b, BigInt::one())
    }

    pub fn add_term(&mut self, i: i64, j: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: i64, j: i64) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Frobenius twist: exponents multiplied by `k`.
    pub fn scale_exponents(&self, k: i64) -> Self {
        Character {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((k * i, k * j), c.clone()))
                .collect(),
        }
    }

    /// Multiply by `t1^di t2^dj`.
    pub fn shift(&self, di: i64, dj: i64) -> Self {
        Character {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i + di, j + dj), c.clone()))
                .collect(),
        }
    }

    pub fn scalar(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Character {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    pub fn is_w_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(&(i, j), c)| self.terms.get(&(j, i)) == Some(c))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Evaluation at `t1 = t2 = 1`.
    pub fn dimension(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl AddAssign<&Character> for Character {
    fn add_assign(&mut self, o: &Character) {
        for (&(i, j), c) in &o.terms {
            self.add_term(i, j, c.clone());
        }
    }
}

impl SubAssign<&Character> for Character {
    fn sub_assign(&mut self, o: &Character) {
        for (&(i, j), c) in &o.terms {
            self.add_term(i, j, -c);
        }
    }
}

impl Add for &Character {
    type Output = Character;
    fn add(self, o: &Character) -> Character {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl Sub for &Character {
    type Output = Character;
    fn sub(self, o: &Character) -> Character {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl Neg for &Character {
    type Output = Character;
    fn neg(self) -> Character {
        self.scalar(&BigInt::from(-1))
    }
}

impl Mul for &Character {
    type Output = Character;
    fn mul(self, o: &Character) -> Character {
        let mut out = Character::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &o.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(
            self.terms
                .iter()
                .map(|(&(i, j), c)| (i, j, IntRepr::from(c))),
        )
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<(i64, i64, IntRepr)> = Vec::deserialize(d)?;
        let mut out = Character::zero();
        for (i, j, c) in raw {
            out.add_term(i, j, c.into_bigint()?);
        }
        Ok(out)
    }
}

pub fn dimension(c: &Character) -> BigInt {
    c.dimension()
}

/// `χ(a,b) = Σ_{i=0}^{a-b} t1^{a-i} t2^{b+i}`.
pub fn weyl_character(w: Weight) -> Result<Character> {
    w.check_dominant()?;
    let mut out = Character::zero();
    for i in 0..=w.diff() {
        out.add_term(w.a - i, w.b + i, BigInt::one());
    }
    Ok(out)
}

/// `w - k α` with `α = ε1 - ε2`.
fn lower(w: Weight, k: i64) -> Weight {
    Weight::new(w.a - k, w.b + k)
}

/// Simple character for `diff(w) <= 2m - 2`: Weyl below `m`, and
/// `χ(w) - χ(w - (r+1)α)` for `diff = m + r`.
pub fn simple_character_restricted(w: Weight, m: i64) -> Result<Character> {
    w.check_dominant()?;
    let d = w.diff();
    if d < m {
        return weyl_character(w);
    }
    if d > 2 * m - 2 {
        return Err(Error::OutOfDomain {
            a: w.a,
            b: w.b,
            modulus: m,
            what: "simple_character_restricted",
        });
    }
    let r = d - m;
    Ok(&weyl_character(w)? - &weyl_character(lower(w, r + 1))?)
}

static TILTING_CACHE: LazyLock<RwLock<HashMap<(i64, Moduli), Arc<Character>>>> =
    LazyLock::new(Default::default);

pub(crate) fn clear_tilting_cache() {
    TILTING_CACHE.write().unwrap().clear();
}

/// Character of `T(diff, 0)`; determinant twists are applied by the caller.
fn tilting_character_top(d: i64, moduli: Moduli) -> Arc<Character> {
    if let Some(c) = TILTING_CACHE.read().unwrap().get(&(d, moduli)) {
        return c.clone();
    }
    let m = moduli.first;
    let w = Weight::new(d, 0);
    let c = if d < m {
        weyl_character(w).expect("dominant")
    } else if d <= 2 * m - 2 {
        let r = d - m;
        &weyl_character(w).expect("dominant") + &weyl_character(lower(w, r + 1)).expect("dominant")
    } else {
        // T((m-1) + ν + mτ) = T((m-1) + ν) ⊗ T̄(τ)^F, 0 <= ν <= m-1
        let x = d - (m - 1);
        let (nu, tau) = (x % m, x / m);
        let core = tilting_character_top(m - 1 + nu, moduli);
        let upper = tilting_character_top(tau, moduli.next());
        &*core * &upper.scale_exponents(m)
    };
    let c = Arc::new(c);
    TILTING_CACHE
        .write()
        .unwrap()
        .insert((d, moduli), c.clone());
    c
}

/// Character of the indecomposable tilting module `T(w)` whose level has the
/// modulus chain `moduli`.
pub fn tilting_character(w: Weight, moduli: Moduli) -> Result<Character> {
    w.check_dominant()?;
    Ok(tilting_character_top(w.diff(), moduli).shift(w.b, w.b))
}

/// [`tilting_character`] with the same modulus at every level.
pub fn tilting_character_mod(w: Weight, m: i64) -> Result<Character> {
    tilting_character(w, Moduli::uniform(m))
}

/// Character of `T(lbl)`: the quantum-level tilting character times the
/// Frobenius-scaled classical tilting characters.
pub fn twisted_tilting_character(lbl: &TwistLabel, params: Params) -> Result<Character> {
    let mut out = Character::one();
    for (k, w) in lbl.flat().into_iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let c = tilting_character(w, params.moduli_at(k))?;
        out = &out * &c.scale_exponents(params.scale_at(k));
    }
    Ok(out)
}

/// Character of `L(w)` through the Steinberg tensor product.
pub fn simple_character(w: Weight, params: Params) -> Result<Character> {
    let lbl = crate::lattice::steinberg_factorize(w, params)?;
    let mut out = Character::one();
    for (k, u) in lbl.flat().into_iter().enumerate() {
        let m = params.modulus_at(k);
        debug_assert!(in_restricted(u.diff(), m));
        let c = simple_character_restricted(u, m)?;
        out = &out * &c.scale_exponents(params.scale_at(k));
    }
    Ok(out)
}

/// Multiset of tilting summands `T(w)` with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TiltingDecomposition {
    #[serde(with = "summand_list")]
    pub summands: BTreeMap<Weight, BigInt>,
}

mod summand_list {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        weight: Weight,
        #[serde(with = "crate::serde_int")]
        mult: BigInt,
    }

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<Weight, BigInt>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|(w, c)| Entry {
            weight: *w,
            mult: c.clone(),
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Weight, BigInt>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.weight, e.mult)).collect())
    }
}

impl TiltingDecomposition {
    pub fn from_weights(ws: impl IntoIterator<Item = Weight>) -> Self {
        let mut out = Self::default();
        for w in ws {
            out.add(w, BigInt::one());
        }
        out
    }

    pub fn add(&mut self, w: Weight, c: BigInt) {
        let e = self.summands.entry(w).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.summands.remove(&w);
        }
    }

    pub fn character(&self, moduli: Moduli) -> Result<Character> {
        let mut out = Character::zero();
        for (w, c) in &self.summands {
            out += &tilting_character(*w, moduli)?.scalar(c);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }
}

/// Peel off tilting characters from the top: repeatedly take the dominant
/// exponent with the largest `i - j` (ties: larger `j`), subtract its
/// coefficient times the tilting character of that weight.
///
/// Tilting characters are unitriangular, so on a genuine tilting character
/// this terminates with nonnegative multiplicities and zero remainder.
pub fn greedy_tilt_decompose(c: &Character, moduli: Moduli) -> Result<TiltingDecomposition> {
    let mut rem = c.clone();
    let mut out = TiltingDecomposition::default();
    loop {
        let top = rem
            .terms
            .iter()
            .filter(|((i, j), _)| i >= j)
            .max_by_key(|((i, j), _)| (i - j, *j))
            .map(|(&(i, j), mu)| (Weight::new(i, j), mu.clone()));
        let Some((w, mu)) = top else { break };
        if mu.is_negative() {
            return Err(Error::NotTilting(format!(
                "negative multiplicity {mu} at weight ({w})"
            )));
        }
        rem -= &tilting_character(w, moduli)?.scalar(&mu);
        out.add(w, mu);
    }
    if !rem.is_zero() {
        return Err(Error::NotTilting(format!(
            "{} non-dominant terms left over (character is not W-symmetric)",
            rem.len()
        )));
    }
    Ok(out)
}

/// Expansion of a `W`-symmetric character in Weyl characters, highest
/// weights in decreasing `(diff, b)` order.
pub fn weyl_expansion(c: &Character) -> Result<Vec<(Weight, BigInt)>> {
    let mut rem = c.clone();
    let mut out = Vec::new();
    while let Some((w, mu)) = rem
        .terms
        .iter()
        .filter(|((i, j), _)| i >= j)
        .max_by_key(|((i, j), _)| (i - j, *j))
        .map(|(&(i, j), mu)| (Weight::new(i, j), mu.clone()))
    {
        rem -= &weyl_character(w)?.scalar(&mu);
        out.push((w, mu));
    }
    if !rem.is_zero() {
        return Err(Error::NotTilting(format!(
            "{} terms left over (character is not W-symmetric)",
            rem.len()
        )));
    }
    Ok(out)
}
