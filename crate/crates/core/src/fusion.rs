//! Decomposition engines and the ring of twisted tilting classes.
//!
//! - [`strike_out`] / [`clebsch_quantum`] / [`clebsch_classical`]: products
//!   of two restricted simples at one level.
//! - [`simple_tensor_simple`]: full `L(w) ⊗ L(w')` decomposition into
//!   twisted tilting modules.
//! - [`donkin_normalize`] and [`multiply`]: arithmetic in the special-label
//!   basis.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::charring::{
    greedy_tilt_decompose, simple_character, tilting_character, twisted_tilting_character,
    Character, TiltingDecomposition,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{
    canonicalize_label, in_band, in_restricted, is_special, recompose, steinberg_factorize, Moduli,
    Params, TwistLabel, Weight,
};

/// An element of the ring in its label basis: canonical labels with integer
/// coefficients, zeros never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassVector {
    entries: BTreeMap<TwistLabel, BigInt>,
}

impl ClassVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::basis(TwistLabel::unit())
    }

    pub fn basis(lbl: TwistLabel) -> Self {
        let mut out = Self::zero();
        out.add_term(lbl, BigInt::one());
        out
    }

    pub fn add_term(&mut self, lbl: TwistLabel, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.entries.entry(lbl.clone()).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.entries.remove(&lbl);
        }
    }

    pub fn add_scaled(&mut self, other: &ClassVector, k: &BigInt) {
        for (l, c) in &other.entries {
            self.add_term(l.clone(), c * k);
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn sub(&self, other: &ClassVector) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::from(-1));
        out
    }

    pub fn add(&self, other: &ClassVector) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::one());
        out
    }

    pub fn get(&self, lbl: &TwistLabel) -> BigInt {
        self.entries.get(lbl).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TwistLabel, &BigInt)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Σ coeff · ch T(label).
    pub fn character(&self, params: Params) -> Result<Character> {
        let mut out = Character::zero();
        for (l, c) in &self.entries {
            out += &twisted_tilting_character(l, params)?.scalar(c);
        }
        Ok(out)
    }

    /// Multiply by the one-dimensional class `d_q^k`.
    pub fn twist(&self, k: i64, params: Params) -> Self {
        let mut out = Self::zero();
        for (l, c) in &self.entries {
            let mut t = l.clone();
            t.qlevel = t.qlevel.twist(k);
            out.add_term(canonicalize_label(&t, params), c.clone());
        }
        out
    }

    /// Document form carrying the tilting/simple flag of every summand.
    pub fn to_document(&self, params: Params) -> ClassVectorDoc {
        ClassVectorDoc {
            summands: self
                .entries
                .iter()
                .map(|(l, c)| SummandDoc {
                    label: l.clone(),
                    mult: c.clone(),
                    tilting: is_tilting_label(l, params),
                    simple: is_simple_label(l, params),
                })
                .collect(),
            params,
        }
    }
}

impl FromIterator<(TwistLabel, BigInt)> for ClassVector {
    fn from_iter<I: IntoIterator<Item = (TwistLabel, BigInt)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (l, c) in iter {
            out.add_term(l, c);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct Term {
    label: TwistLabel,
    #[serde(with = "crate::serde_int")]
    mult: BigInt,
}

impl Serialize for ClassVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|(l, c)| Term {
            label: l.clone(),
            mult: c.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for ClassVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<Term> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|t| (t.label, t.mult)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandDoc {
    pub label: TwistLabel,
    #[serde(with = "crate::serde_int")]
    pub mult: BigInt,
    pub tilting: bool,
    pub simple: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVectorDoc {
    pub summands: Vec<SummandDoc>,
    pub params: Params,
}

impl ClassVectorDoc {
    pub fn to_class_vector(&self) -> ClassVector {
        self.summands
            .iter()
            .map(|s| (s.label.clone(), s.mult.clone()))
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrikeOutTrace {
    pub listed: Vec<Weight>,
    pub struck: BTreeSet<Weight>,
    pub survivors: BTreeSet<Weight>,
}

/// Strike-out rule for `L(a,0) ⊗ L(b,0)` at modulus `m`.
///
/// Lists `(a+b-i, i)` for `0 <= i <= min(a,b)`; for every listed `j` with
/// `a + b - 2j = m + u`, `0 <= u <= m-2`, strikes `(a+b-j-u-1, j+u+1)` when it
/// is in the list.
pub fn strike_out(a: i64, b: i64, m: i64) -> StrikeOutTrace {
    let n = a + b;
    let listed: Vec<Weight> = (0..=a.min(b)).map(|i| Weight::new(n - i, i)).collect();
    let on_list: BTreeSet<Weight> = listed.iter().copied().collect();
    let mut struck = BTreeSet::new();
    for j in 0..=a.min(b) {
        let u = n - 2 * j - m;
        if (0..=m - 2).contains(&u) {
            let x = Weight::new(n - j - u - 1, j + u + 1);
            if on_list.contains(&x) {
                struck.insert(x);
            }
        }
    }
    let survivors = on_list.difference(&struck).copied().collect();
    StrikeOutTrace {
        listed,
        struck,
        survivors,
    }
}

/// One level of a simple ⊗ simple product: `d^det_power ⊗ ⊕ T(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelProduct {
    pub det_power: i64,
    pub survivors: TiltingDecomposition,
    pub trace: StrikeOutTrace,
}

fn clebsch(w: Weight, w2: Weight, m: i64, what: &'static str) -> Result<LevelProduct> {
    for x in [w, w2] {
        x.check_dominant()?;
        if !in_restricted(x.diff(), m) {
            return Err(Error::OutOfDomain {
                a: x.a,
                b: x.b,
                modulus: m,
                what,
            });
        }
    }
    let trace = strike_out(w.diff(), w2.diff(), m);
    Ok(LevelProduct {
        det_power: w.b + w2.b,
        survivors: TiltingDecomposition::from_weights(trace.survivors.iter().copied()),
        trace,
    })
}

/// `L(w) ⊗ L(w2)` for `w, w2` restricted at the quantum level.
pub fn clebsch_quantum(w: Weight, w2: Weight, ell: i64) -> Result<LevelProduct> {
    clebsch(w, w2, ell, "clebsch_quantum")
}

/// `L̄(w) ⊗ L̄(w2)` for classical weights with `diff < p`.
pub fn clebsch_classical(w: Weight, w2: Weight, p: i64) -> Result<LevelProduct> {
    clebsch(w, w2, p, "clebsch_classical")
}

/// Per-level data behind [`simple_tensor_simple`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelTrace {
    /// `-1` for the quantum level, `i >= 0` for classical level `i`.
    pub level: i64,
    pub modulus: i64,
    pub left: Weight,
    pub right: Weight,
    pub product: LevelProduct,
}

fn cartesian<T: Clone>(choices: &[Vec<(T, BigInt)>]) -> Vec<(Vec<T>, BigInt)> {
    let mut acc: Vec<(Vec<T>, BigInt)> = vec![(Vec::new(), BigInt::one())];
    for opts in choices {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for (prefix, c) in &acc {
            for (x, m) in opts {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push((v, c * m));
            }
        }
        acc = next;
    }
    acc
}

fn simple_tensor_levels(
    w: Weight,
    w2: Weight,
    params: Params,
) -> Result<(ClassVector, Vec<LevelTrace>)> {
    let lw = steinberg_factorize(w, params)?;
    let lw2 = steinberg_factorize(w2, params)?;
    let n = lw.flat_len().max(lw2.flat_len());
    let mut traces = Vec::with_capacity(n);
    let mut choices = Vec::with_capacity(n);
    for k in 0..n {
        let (u, v) = (lw.at(k), lw2.at(k));
        let m = params.modulus_at(k);
        let product = if k == 0 {
            clebsch_quantum(u, v, m)?
        } else {
            clebsch_classical(u, v, m)?
        };
        choices.push(
            product
                .survivors
                .summands
                .iter()
                .map(|(s, c)| (s.twist(product.det_power), c.clone()))
                .collect::<Vec<_>>(),
        );
        traces.push(LevelTrace {
            level: k as i64 - 1,
            modulus: m,
            left: u,
            right: v,
            product,
        });
    }
    let out = cartesian(&choices)
        .into_iter()
        .map(|(flat, c)| (canonicalize_label(&TwistLabel::from_flat(&flat), params), c))
        .collect();
    Ok((out, traces))
}

/// Decompose `L(w) ⊗ L(w2)` into twisted tilting modules.
pub fn simple_tensor_simple(w: Weight, w2: Weight, params: Params) -> Result<ClassVector> {
    Ok(simple_tensor_levels(w, w2, params)?.0)
}

fn flat_height(lbl: &TwistLabel) -> usize {
    (lbl.height() + 1) as usize
}

/// Tilting criterion: `ℓ-1 <= diff(u_-1) <= 2ℓ-2` and `p-1 <= diff(u_i) <= 2p-2`
/// for every level strictly below the height. The top level and any
/// determinant-only levels above it are unconstrained.
pub fn is_tilting_label(lbl: &TwistLabel, params: Params) -> bool {
    (0..flat_height(lbl)).all(|k| in_band(lbl.at(k).diff(), params.modulus_at(k)))
}

/// Every level restricted: the label is a Steinberg-factorized simple.
pub fn is_simple_label(lbl: &TwistLabel, params: Params) -> bool {
    lbl.flat()
        .iter()
        .enumerate()
        .all(|(k, w)| in_restricted(w.diff(), params.modulus_at(k)))
}

/// `T(u) ⊗ T(v)` at one level, as tilting weights with multiplicities.
fn level_tensor(u: Weight, v: Weight, moduli: Moduli) -> Result<Vec<(Weight, BigInt)>> {
    if u.diff() == 0 {
        return Ok(vec![(v.twist(u.b), BigInt::one())]);
    }
    if v.diff() == 0 {
        return Ok(vec![(u.twist(v.b), BigInt::one())]);
    }
    let c = &tilting_character(u, moduli)? * &tilting_character(v, moduli)?;
    Ok(greedy_tilt_decompose(&c, moduli)?
        .summands
        .into_iter()
        .collect())
}

/// Split `w` with `diff > 2m - 2` as `T(w) = T(core) ⊗ T̄(tau)^F`.
fn donkin_split(w: Weight, m: i64) -> (Weight, Weight) {
    let x = w.diff() - (m - 1);
    let (nu, tau) = (x % m, x / m);
    (Weight::new(w.b + m - 1 + nu, w.b), Weight::new(tau, 0))
}

fn normalize_flat(
    mut flat: Vec<Weight>,
    coeff: BigInt,
    params: Params,
    out: &mut ClassVector,
) -> Result<()> {
    for k in 0..flat.len() {
        let m = params.modulus_at(k);
        if flat[k].diff() <= 2 * m - 2 {
            continue;
        }
        let (core, tau) = donkin_split(flat[k], m);
        flat[k] = core;
        if flat.len() == k + 1 {
            flat.push(Weight::ZERO);
        }
        let merged = level_tensor(tau, flat[k + 1], params.moduli_at(k + 1))?;
        for (w, mu) in merged {
            let mut next = flat.clone();
            next[k + 1] = w;
            normalize_flat(next, &coeff * mu, params, out)?;
        }
        return Ok(());
    }
    out.add_term(
        canonicalize_label(&TwistLabel::from_flat(&flat), params),
        coeff,
    );
    Ok(())
}

/// Rewrite an arbitrary dominant label into the special basis.
///
/// A level past its band is factored as band core times a Frobenius twist,
/// and the twist is tensored into the next level up (decomposed there when
/// that level is occupied), bottom to top.
pub fn donkin_normalize(lbl: &TwistLabel, params: Params) -> Result<ClassVector> {
    lbl.check_dominant()?;
    let mut out = ClassVector::zero();
    normalize_flat(lbl.flat(), BigInt::one(), params, &mut out)?;
    Ok(out)
}

type ProductKey = (Params, TwistLabel, TwistLabel);

static PRODUCT_CACHE: LazyLock<RwLock<HashMap<ProductKey, ClassVector>>> =
    LazyLock::new(Default::default);

/// Drop the memoized tilting characters and label products.
pub fn clear_caches() {
    PRODUCT_CACHE.write().unwrap().clear();
    crate::charring::clear_tilting_cache();
}

/// Product of two basis labels.
pub fn label_product(x: &TwistLabel, y: &TwistLabel, params: Params) -> Result<ClassVector> {
    let key = (params, x.clone(), y.clone());
    if let Some(v) = PRODUCT_CACHE.read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    x.check_dominant()?;
    y.check_dominant()?;
    let n = x.flat_len().max(y.flat_len());
    let choices = (0..n)
        .map(|k| level_tensor(x.at(k), y.at(k), params.moduli_at(k)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ClassVector::zero();
    for (flat, c) in cartesian(&choices) {
        normalize_flat(flat, c, params, &mut out)?;
    }
    PRODUCT_CACHE.write().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Ring multiplication, bilinear over the label basis.
pub fn multiply(x: &ClassVector, y: &ClassVector, params: Params) -> Result<ClassVector> {
    let mut out = ClassVector::zero();
    for (lx, cx) in x.iter() {
        for (ly, cy) in y.iter() {
            out.add_scaled(&label_product(lx, ly, params)?, &(cx * cy));
        }
    }
    Ok(out)
}

/// Structure constants for every pair `(labels[i], labels[j])` with `i <= j`,
/// in row-major order.
pub fn structure_constants(
    labels: &[TwistLabel],
    params: Params,
    exec: Exec,
) -> Result<Vec<(TwistLabel, TwistLabel, ClassVector)>> {
    let pairs: Vec<(usize, usize)> = (0..labels.len())
        .flat_map(|i| (i..labels.len()).map(move |j| (i, j)))
        .collect();
    exec.map(&pairs, |&(i, j)| {
        label_product(&labels[i], &labels[j], params)
            .map(|v| (labels[i].clone(), labels[j].clone(), v))
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandReport {
    pub label: TwistLabel,
    #[serde(with = "crate::serde_int")]
    pub mult: BigInt,
    pub tilting: bool,
    pub simple: bool,
    pub special: bool,
    pub character: Character,
    #[serde(with = "crate::serde_int")]
    pub dimension: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub params: Params,
    pub left: Weight,
    pub right: Weight,
    pub left_label: TwistLabel,
    pub right_label: TwistLabel,
    pub levels: Vec<LevelTrace>,
    pub summands: Vec<SummandReport>,
    #[serde(with = "crate::serde_int")]
    pub dimension: BigInt,
    /// `None` when the conservation check was skipped.
    pub conserved: Option<bool>,
}

/// [`simple_tensor_simple`] with per-summand flags, characters, dimensions and
/// the per-level strike-out traces. With `verify`, also checks
/// `ch L(w) · ch L(w2) = Σ mult · ch T(label)`.
pub fn decompose_report(
    w: Weight,
    w2: Weight,
    params: Params,
    verify: bool,
) -> Result<DecomposeReport> {
    let (cv, levels) = simple_tensor_levels(w, w2, params)?;
    let mut summands = Vec::with_capacity(cv.len());
    let mut dimension = BigInt::zero();
    let mut total = Character::zero();
    for (l, c) in cv.iter() {
        let character = twisted_tilting_character(l, params)?;
        let dim = character.dimension();
        dimension += &dim * c;
        if verify {
            total += &character.scalar(c);
        }
        summands.push(SummandReport {
            label: l.clone(),
            mult: c.clone(),
            tilting: is_tilting_label(l, params),
            simple: is_simple_label(l, params),
            special: is_special(l, params),
            character,
            dimension: dim,
        });
    }
    let conserved = if verify {
        Some(&simple_character(w, params)? * &simple_character(w2, params)? == total)
    } else {
        None
    };
    Ok(DecomposeReport {
        params,
        left: w,
        right: w2,
        left_label: steinberg_factorize(w, params)?,
        right_label: steinberg_factorize(w2, params)?,
        levels,
        summands,
        dimension,
        conserved,
    })
}

/// Character the tilting flag promises: `ch T(recomposed weight)`.
pub fn expected_tilting_character(lbl: &TwistLabel, params: Params) -> Result<Character> {
    tilting_character(recompose(lbl, params), params.quantum())
}

/// Character the simple flag promises: `ch L(recomposed weight)`.
pub fn expected_simple_character(lbl: &TwistLabel, params: Params) -> Result<Character> {
    simple_character(recompose(lbl, params), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charring::weyl_character;
    use crate::lattice::special_labels;
    use proptest::prelude::*;

    fn w(a: i64, b: i64) -> Weight {
        Weight::new(a, b)
    }

    fn lbl(s: &str) -> TwistLabel {
        s.parse().unwrap()
    }

    fn cv(terms: &[(&str, i64)]) -> ClassVector {
        terms
            .iter()
            .map(|(s, c)| (lbl(s), BigInt::from(*c)))
            .collect()
    }

    fn set(ws: &[(i64, i64)]) -> BTreeSet<Weight> {
        ws.iter().map(|&(a, b)| w(a, b)).collect()
    }

    #[test]
    fn clebsch_quantum_examples() {
        let r = clebsch_quantum(w(4, 0), w(4, 0), 5).unwrap();
        assert_eq!(r.det_power, 0);
        assert_eq!(r.trace.survivors, set(&[(8, 0), (7, 1), (6, 2)]));
        assert_eq!(r.trace.struck, set(&[(5, 3), (4, 4)]));
        let dims: Vec<_> = r
            .survivors
            .summands
            .keys()
            .map(|u| {
                tilting_character(*u, Moduli::uniform(5))
                    .unwrap()
                    .dimension()
            })
            .collect();
        assert_eq!(dims.iter().sum::<BigInt>(), BigInt::from(25));

        let r = clebsch_quantum(w(2, 0), w(2, 0), 3).unwrap();
        assert_eq!(r.trace.survivors, set(&[(4, 0), (3, 1)]));
        assert_eq!(r.trace.struck, set(&[(2, 2)]));

        for l in 2..8 {
            for a in 0..l {
                let r = clebsch_quantum(w(0, 0), w(a, 0), l).unwrap();
                assert_eq!(r.trace.survivors, set(&[(a, 0)]));
            }
        }
        // determinant bookkeeping
        let r = clebsch_quantum(w(3, 1), w(2, 2), 5).unwrap();
        assert_eq!(r.det_power, 3);
        assert!(clebsch_quantum(w(5, 0), w(1, 0), 5).is_err());
    }

    #[test]
    fn clebsch_classical_examples() {
        let r = clebsch_classical(w(2, 0), w(2, 0), 3).unwrap();
        assert_eq!(r.trace.survivors, set(&[(4, 0), (3, 1)]));
        let r = clebsch_classical(w(1, 0), w(1, 0), 2).unwrap();
        assert_eq!(r.trace.survivors, set(&[(2, 0)]));
        assert_eq!(r.trace.struck, set(&[(1, 1)]));
        let r = clebsch_classical(w(1, 0), w(1, 0), 5).unwrap();
        assert_eq!(r.trace.survivors, set(&[(2, 0), (1, 1)]));
        assert!(r.trace.struck.is_empty());
    }

    #[test]
    fn longer_list_bound_is_needed() {
        // ℓ = 5, a = b = 3: (3,3) survives although its index exceeds a+b-ℓ
        let r = clebsch_quantum(w(3, 0), w(3, 0), 5).unwrap();
        assert!(r.trace.survivors.contains(&w(3, 3)));
        assert_eq!(r.trace.survivors, set(&[(6, 0), (5, 1), (3, 3)]));
    }

    #[test]
    fn simple_tensor_examples() {
        let p32 = Params::new(3, 2).unwrap();
        let got = simple_tensor_simple(w(5, 0), w(5, 0), p32).unwrap();
        assert_eq!(got, cv(&[("4,0;2,0", 1), ("3,1;2,0", 1)]));
        assert_eq!(got.character(p32).unwrap().dimension(), BigInt::from(36));

        let p53 = Params::new(5, 3).unwrap();
        let got = simple_tensor_simple(w(4, 0), w(4, 0), p53).unwrap();
        assert_eq!(got, cv(&[("8,0", 1), ("7,1", 1), ("6,2", 1)]));

        for wt in [w(3, 0), w(2, 1), w(17, 4)] {
            let got = simple_tensor_simple(w(0, 0), wt, p53).unwrap();
            assert_eq!(
                got,
                ClassVector::basis(steinberg_factorize(wt, p53).unwrap())
            );
        }
    }

    #[test]
    fn flags() {
        let p53 = Params::new(5, 3).unwrap();
        assert!(is_tilting_label(&lbl("8,0"), p53));
        assert!(is_tilting_label(&lbl("4,0;2,0"), p53));
        assert!(is_simple_label(&lbl("2,0;1,0"), p53));
        assert!(!is_tilting_label(&lbl("2,0;1,0"), p53));
        // determinant-only levels above the height do not count
        assert!(is_tilting_label(&lbl("4,0;0,0;1,1"), p53));
        assert!(!is_tilting_label(&lbl("4,0;1,1;2,0"), p53));
    }

    #[test]
    fn donkin_examples() {
        let p53 = Params::new(5, 3).unwrap();
        let got = donkin_normalize(&lbl("9,0"), p53).unwrap();
        assert_eq!(got, cv(&[("4,0;1,0", 1)]));
        assert_eq!(
            got.character(p53).unwrap(),
            tilting_character(w(9, 0), p53.quantum()).unwrap()
        );
        assert_eq!(
            donkin_normalize(&lbl("8,0"), p53).unwrap(),
            cv(&[("8,0", 1)])
        );

        let p23 = Params::new(2, 3).unwrap();
        let src = lbl("1,0;5,0");
        let got = donkin_normalize(&src, p23).unwrap();
        assert_eq!(got, cv(&[("1,0;2,0;1,0", 1)]));
        assert_eq!(
            got.character(p23).unwrap(),
            twisted_tilting_character(&src, p23).unwrap()
        );
    }

    #[test]
    fn donkin_merges_into_occupied_level() {
        // T(3,0) at ℓ = 2 pushes Ē into level 0, which already holds T̄(1,0)
        let p23 = Params::new(2, 3).unwrap();
        let src = lbl("3,0;1,0");
        let got = donkin_normalize(&src, p23).unwrap();
        assert!(got.len() > 1);
        assert!(got.iter().all(|(l, _)| is_special(l, p23)));
        assert_eq!(
            got.character(p23).unwrap(),
            twisted_tilting_character(&src, p23).unwrap()
        );
    }

    #[test]
    fn multiply_examples() {
        let p23 = Params::new(2, 3).unwrap();
        let e = cv(&[("1,0", 1)]);
        let e2 = multiply(&e, &e, p23).unwrap();
        assert_eq!(e2, cv(&[("2,0", 1)]));
        let e3 = multiply(&e2, &e, p23).unwrap();
        assert_eq!(e3, cv(&[("1,0;1,0", 1), ("2,1", 2)]));
        let x = cv(&[("2,0;1,0", 3), ("1,1;2,0", -2)]);
        assert_eq!(multiply(&x, &ClassVector::unit(), p23).unwrap(), x);
    }

    #[test]
    fn report_flags() {
        let p53 = Params::new(5, 3).unwrap();
        let r = decompose_report(w(4, 0), w(4, 0), p53, true).unwrap();
        assert_eq!(r.summands.len(), 3);
        assert!(r.summands.iter().all(|s| s.tilting && s.special));
        assert_eq!(r.dimension, BigInt::from(25));
        assert_eq!(r.conserved, Some(true));
        let r = decompose_report(w(0, 0), w(0, 0), p53, true).unwrap();
        assert_eq!(r.summands.len(), 1);
        assert_eq!(r.summands[0].label, TwistLabel::unit());
    }

    #[test]
    fn document_round_trip() {
        let p23 = Params::new(2, 3).unwrap();
        let x = cv(&[("1,0;1,0", 1), ("2,1", 2)]);
        let doc = x.to_document(p23);
        let s = serde_json::to_string(&doc).unwrap();
        assert!(s.starts_with(
            r#"{"summands":[{"label":{"qlevel":[1,0],"levels":[[1,0]]},"mult":1,"tilting":true"#
        ));
        assert!(s.ends_with(r#""params":{"l":2,"p":3}}"#));
        let back: ClassVectorDoc = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_class_vector(), x);
    }

    #[test]
    fn sub_modulus_regime_is_classical() {
        for l in 3..10 {
            for a in 0..l {
                for b in 0..l - a {
                    let r = clebsch_quantum(w(a, 0), w(b, 0), l).unwrap();
                    assert!(r.trace.struck.is_empty());
                    let all: BTreeSet<_> = (0..=a.min(b)).map(|i| w(a + b - i, i)).collect();
                    assert_eq!(r.trace.survivors, all);
                }
            }
        }
    }

    #[test]
    fn classical_matches_quantum_rule() {
        for m in [2, 3, 5, 7] {
            for a in 0..m {
                for b in 0..m {
                    assert_eq!(
                        clebsch_quantum(w(a, 0), w(b, 0), m).unwrap().trace,
                        clebsch_classical(w(a, 0), w(b, 0), m).unwrap().trace
                    );
                }
            }
        }
    }

    #[test]
    fn strike_out_agrees_with_characters_small() {
        for l in 2..8 {
            for a in 0..l {
                for b in 0..l {
                    let c = &weyl_character(w(a, 0)).unwrap() * &weyl_character(w(b, 0)).unwrap();
                    let oracle = greedy_tilt_decompose(&c, Moduli::uniform(l)).unwrap();
                    assert_eq!(
                        clebsch_quantum(w(a, 0), w(b, 0), l).unwrap().survivors,
                        oracle
                    );
                }
            }
        }
    }

    #[test]
    fn structure_constants_parallel_matches_sequential() {
        let p = Params::new(3, 2).unwrap();
        let labels = special_labels(p, 8, None);
        let a = structure_constants(&labels, p, Exec::Sequential).unwrap();
        let b = structure_constants(&labels, p, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), labels.len() * (labels.len() + 1) / 2);
    }

    fn params() -> impl Strategy<Value = Params> {
        prop::sample::select(vec![(2, 3), (3, 2), (3, 5), (5, 2), (4, 3), (5, 3)])
            .prop_map(|(l, p)| Params::new(l, p).unwrap())
    }

    fn special_label(p: Params) -> impl Strategy<Value = TwistLabel> {
        let (l, pp) = (p.ell(), p.p());
        (
            0..=2 * l - 2,
            -2i64..3,
            prop::collection::vec((0..=2 * pp - 2, 0i64..2), 0..2),
        )
            .prop_map(move |(d, b, lv)| {
                let t = TwistLabel::new(
                    w(d + b, b),
                    lv.into_iter().map(|(d, b)| w(d + b, b)).collect(),
                );
                canonicalize_label(&t, p)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conservation_and_commutativity(
            p in params(), d1 in 0i64..40, d2 in 0i64..40, b1 in -3i64..3, b2 in -3i64..3,
        ) {
            let (x, y) = (w(d1 + b1, b1), w(d2 + b2, b2));
            let got = simple_tensor_simple(x, y, p).unwrap();
            prop_assert_eq!(&got, &simple_tensor_simple(y, x, p).unwrap());
            let lhs = &simple_character(x, p).unwrap() * &simple_character(y, p).unwrap();
            prop_assert_eq!(lhs, got.character(p).unwrap());
            for (l, c) in got.iter() {
                prop_assert!(is_special(l, p));
                prop_assert!(c >= &BigInt::one());
            }
        }

        #[test]
        fn products_preserve_characters(
            (p, x, y) in params().prop_flat_map(|p| (Just(p), special_label(p), special_label(p))),
        ) {
            let prod = label_product(&x, &y, p).unwrap();
            let lhs = &twisted_tilting_character(&x, p).unwrap() * &twisted_tilting_character(&y, p).unwrap();
            prop_assert_eq!(prod.character(p).unwrap(), lhs);
            prop_assert_eq!(&prod, &label_product(&y, &x, p).unwrap());
            for (l, c) in prod.iter() {
                prop_assert!(is_special(l, p));
                prop_assert!(c >= &BigInt::one());
                prop_assert_eq!(&canonicalize_label(l, p), l);
            }
        }

        #[test]
        fn donkin_preserves_character(
            p in params(), d in 0i64..80, b in -2i64..3, up in prop::collection::vec((0i64..12, 0i64..3), 0..2),
        ) {
            let t = TwistLabel::new(w(d + b, b), up.into_iter().map(|(d, b)| w(d + b, b)).collect());
            let n = donkin_normalize(&t, p).unwrap();
            prop_assert_eq!(n.character(p).unwrap(), twisted_tilting_character(&t, p).unwrap());
            prop_assert!(n.iter().all(|(l, _)| is_special(l, p)));
        }
    }
}
