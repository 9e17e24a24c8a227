//! Weight-lattice bookkeeping for `GL_2`.
//!
//! A weight is a pair `(a, b)` of integers, dominant when `a >= b`. The
//! quantity `a - b` (the pairing with the simple coroot) drives everything:
//! restricted region, tilting band, Steinberg digits and length. The second
//! coordinate only records a power of the determinant.
//!
//! A [`TwistLabel`] names the module
//! `T(u_-1) ⊗ (T̄(u_0) ⊗ T̄(u_1)^F̄ ⊗ ...)^F`. Level `-1` is quantum (modulus
//! `ℓ`); levels `0, 1, ...` are classical (modulus `p`). Internally the levels
//! are addressed by a flat index `k`, where `k = 0` is level `-1` and `k = i+1`
//! is classical level `i`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    ell: i64,
    p: i64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    l: i64,
    p: i64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Params::new(r.l, r.p)
    }
}

impl From<Params> for RawParams {
    fn from(p: Params) -> Self {
        RawParams { l: p.ell, p: p.p }
    }
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Params {
    /// `ell >= 2`, `p` prime and `gcd(ell, p) = 1`.
    pub fn new(ell: i64, p: i64) -> Result<Self> {
        if ell < 2 {
            return Err(Error::InvalidParams(format!(
                "l = {ell} must be at least 2"
            )));
        }
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        if ell.gcd(&p) != 1 {
            return Err(Error::InvalidParams(format!(
                "gcd(l, p) = gcd({ell}, {p}) != 1: no primitive l-th root of unity in characteristic p"
            )));
        }
        Ok(Params { ell, p })
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    /// Modulus chain for the quantum level: `ℓ`, then `p` for every twist.
    pub fn quantum(&self) -> Moduli {
        Moduli {
            first: self.ell,
            rest: self.p,
        }
    }

    /// Modulus chain for a classical level.
    pub fn classical(&self) -> Moduli {
        Moduli::uniform(self.p)
    }

    pub fn modulus_at(&self, k: usize) -> i64 {
        if k == 0 {
            self.ell
        } else {
            self.p
        }
    }

    pub fn moduli_at(&self, k: usize) -> Moduli {
        if k == 0 {
            self.quantum()
        } else {
            self.classical()
        }
    }

    /// Exponent scale of flat level `k` inside a character: `1` for the
    /// quantum level, `ℓ p^i` for classical level `i = k - 1`.
    pub fn scale_at(&self, k: usize) -> i64 {
        if k == 0 {
            1
        } else {
            self.ell * self.p.pow((k - 1) as u32)
        }
    }
}

/// The moduli governing tilting modules at one level and at every Frobenius
/// twist above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Moduli {
    pub first: i64,
    pub rest: i64,
}

impl Moduli {
    pub fn uniform(m: i64) -> Self {
        Moduli { first: m, rest: m }
    }

    /// Chain seen by the Frobenius twist of this level.
    pub fn next(self) -> Self {
        Moduli::uniform(self.rest)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct Weight {
    pub a: i64,
    pub b: i64,
}

impl From<(i64, i64)> for Weight {
    fn from((a, b): (i64, i64)) -> Self {
        Weight { a, b }
    }
}

impl From<Weight> for (i64, i64) {
    fn from(w: Weight) -> Self {
        (w.a, w.b)
    }
}

impl Weight {
    pub const ZERO: Weight = Weight { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Weight { a, b }
    }

    pub fn diff(self) -> i64 {
        self.a - self.b
    }

    pub fn is_dominant(self) -> bool {
        self.a >= self.b
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// Tensor with the `k`-th power of the determinant.
    pub fn twist(self, k: i64) -> Weight {
        Weight::new(self.a + k, self.b + k)
    }

    pub fn check_dominant(self) -> Result<Self> {
        if self.is_dominant() {
            Ok(self)
        } else {
            Err(Error::NotDominant(self.a, self.b))
        }
    }
}

impl std::ops::Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight::new(self.a + o.a, self.b + o.b)
    }
}

impl std::ops::Sub for Weight {
    type Output = Weight;
    fn sub(self, o: Weight) -> Weight {
        Weight::new(self.a - o.a, self.b - o.b)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .trim()
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected `a,b`, got {s:?}")))?;
        let a = a
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer in {s:?}")))?;
        let b = b
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer in {s:?}")))?;
        Ok(Weight::new(a, b))
    }
}

pub fn is_dominant(w: Weight) -> bool {
    w.is_dominant()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `diff <= m - 1`: simple = Weyl = tilting.
    Restricted,
    /// `m - 1 < diff <= 2m - 2` (the boundary `diff = m - 1` reports as
    /// [`Region::Restricted`]).
    Band,
    Outside,
}

impl Region {
    /// Membership in `π = {diff <= 2m - 2}`.
    pub fn in_pi(self) -> bool {
        !matches!(self, Region::Outside)
    }
}

pub fn in_restricted(diff: i64, m: i64) -> bool {
    (0..=m - 1).contains(&diff)
}

pub fn in_band(diff: i64, m: i64) -> bool {
    (m - 1..=2 * m - 2).contains(&diff)
}

pub fn in_pi(diff: i64, m: i64) -> bool {
    (0..=2 * m - 2).contains(&diff)
}

pub fn region(w: Weight, modulus: i64) -> Result<Region> {
    let d = w.check_dominant()?.diff();
    Ok(if d < modulus {
        Region::Restricted
    } else if d <= 2 * modulus - 2 {
        Region::Band
    } else {
        Region::Outside
    })
}

pub fn frobenius_scale(w: Weight, k: i64) -> Weight {
    Weight::new(k * w.a, k * w.b)
}

pub fn length_weight(w: Weight) -> i64 {
    w.diff()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TwistLabel {
    pub qlevel: Weight,
    pub levels: Vec<Weight>,
}

impl TwistLabel {
    pub fn new(qlevel: Weight, levels: Vec<Weight>) -> Self {
        TwistLabel { qlevel, levels }
    }

    pub fn unit() -> Self {
        TwistLabel::new(Weight::ZERO, Vec::new())
    }

    /// Build from the flat level list (index 0 is the quantum level).
    pub fn from_flat(flat: &[Weight]) -> Self {
        match flat.split_first() {
            None => TwistLabel::unit(),
            Some((q, rest)) => TwistLabel::new(*q, rest.to_vec()),
        }
    }

    pub fn flat(&self) -> Vec<Weight> {
        let mut v = Vec::with_capacity(self.levels.len() + 1);
        v.push(self.qlevel);
        v.extend_from_slice(&self.levels);
        v
    }

    /// Weight at flat index `k`, zero past the stored levels.
    pub fn at(&self, k: usize) -> Weight {
        if k == 0 {
            self.qlevel
        } else {
            self.levels.get(k - 1).copied().unwrap_or(Weight::ZERO)
        }
    }

    pub fn flat_len(&self) -> usize {
        self.levels.len() + 1
    }

    /// Height in the module's own indexing: the last level with a nonzero
    /// `diff` (`-1` for the quantum level, or when every diff vanishes).
    /// Levels above it only carry determinant twists.
    pub fn height(&self) -> i64 {
        self.levels
            .iter()
            .rposition(|w| w.diff() != 0)
            .map(|i| i as i64)
            .unwrap_or(-1)
    }

    pub fn is_dominant(&self) -> bool {
        self.qlevel.is_dominant() && self.levels.iter().all(|w| w.is_dominant())
    }

    pub fn check_dominant(&self) -> Result<()> {
        self.qlevel.check_dominant()?;
        for w in &self.levels {
            w.check_dominant()?;
        }
        Ok(())
    }
}

impl fmt::Display for TwistLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.qlevel)?;
        for w in &self.levels {
            write!(f, ";{w}")?;
        }
        Ok(())
    }
}

impl FromStr for TwistLabel {
    type Err = Error;
    /// `a,b;a0,b0;a1,b1`
    fn from_str(s: &str) -> Result<Self> {
        let flat = s
            .split(';')
            .map(Weight::from_str)
            .collect::<Result<Vec<_>>>()?;
        Ok(TwistLabel::from_flat(&flat))
    }
}

/// Combined length `ln(u_-1) + ℓ Σ p^i ln(u_i)`.
pub fn length_label(lbl: &TwistLabel, params: Params) -> i64 {
    lbl.flat()
        .iter()
        .enumerate()
        .map(|(k, w)| params.scale_at(k) * w.diff())
        .sum()
}

pub fn is_special(lbl: &TwistLabel, params: Params) -> bool {
    lbl.flat()
        .iter()
        .enumerate()
        .all(|(k, w)| in_pi(w.diff(), params.modulus_at(k)))
}

/// Recompose the highest weight `u_-1 + ℓ u_0 + ℓp u_1 + ...`.
pub fn recompose(lbl: &TwistLabel, params: Params) -> Weight {
    lbl.flat()
        .iter()
        .enumerate()
        .fold(Weight::ZERO, |acc, (k, w)| {
            acc + frobenius_scale(*w, params.scale_at(k))
        })
}

/// Total determinant exponent of a label, in units of the quantum determinant.
pub fn determinant_degree(lbl: &TwistLabel, params: Params) -> i128 {
    lbl.flat()
        .iter()
        .enumerate()
        .map(|(k, w)| params.scale_at(k) as i128 * w.b as i128)
        .sum()
}

/// Normal form for the determinant coordinates.
///
/// Since `d_q^ℓ = d^F` and `d^p = d^F̄` as classes, only the diffs and the
/// total determinant degree matter. Below the height the `b`-coordinates are
/// digits (`[0, ℓ-1]` at the quantum level, `[0, p-1]` above). At the height,
/// a nonnegative remainder keeps being expanded into digits on higher
/// determinant-only levels; a negative remainder stays put. Trailing zero
/// weights are trimmed.
pub fn canonicalize_label(lbl: &TwistLabel, params: Params) -> TwistLabel {
    let flat = lbl.flat();
    let top = (lbl.height() + 1) as usize;
    let mut rem = determinant_degree(lbl, params);
    let mut bs: Vec<i128> = Vec::with_capacity(flat.len());
    for k in 0..top {
        let m = params.modulus_at(k) as i128;
        bs.push(rem.rem_euclid(m));
        rem = rem.div_euclid(m);
    }
    if rem < 0 {
        bs.push(rem);
    } else {
        let mut k = top;
        loop {
            let m = params.modulus_at(k) as i128;
            bs.push(rem % m);
            rem /= m;
            k += 1;
            if rem == 0 {
                break;
            }
        }
    }
    let len = flat.len().max(bs.len());
    let mut out: Vec<Weight> = (0..len)
        .map(|k| {
            let d = flat.get(k).map(|w| w.diff()).unwrap_or(0);
            let b = bs.get(k).copied().unwrap_or(0) as i64;
            Weight::new(b + d, b)
        })
        .collect();
    while out.len() > 1 && out.last().is_some_and(|w| w.is_zero()) {
        out.pop();
    }
    TwistLabel::from_flat(&out)
}

/// Simple-module label of `L(w)` via base-`(ℓ, p, p, ...)` digits of `diff(w)`.
pub fn steinberg_factorize(w: Weight, params: Params) -> Result<TwistLabel> {
    w.check_dominant()?;
    let mut d = w.diff();
    let mut flat = Vec::new();
    let mut k = 0;
    while d > 0 || k == 0 {
        let m = params.modulus_at(k);
        flat.push(Weight::new(d % m, 0));
        d /= m;
        k += 1;
    }
    flat[0] = flat[0].twist(w.b);
    Ok(canonicalize_label(&TwistLabel::from_flat(&flat), params))
}

/// Special labels with every `b`-coordinate zero, of length at most
/// `max_length` and height at most `max_height` (if given). Each represents
/// its coset under determinant twists. Sorted.
pub fn special_labels(params: Params, max_length: i64, max_height: Option<i64>) -> Vec<TwistLabel> {
    let mut out = Vec::new();
    let mut cur: Vec<i64> = Vec::new();
    fn rec(
        params: Params,
        k: usize,
        budget: i64,
        max_height: Option<i64>,
        cur: &mut Vec<i64>,
        out: &mut Vec<TwistLabel>,
    ) {
        let scale = params.scale_at(k);
        if scale > budget || max_height.is_some_and(|h| k as i64 - 1 > h) {
            // no further nonzero level fits; emit with trailing zeros trimmed
            let mut flat: Vec<Weight> = cur.iter().map(|&d| Weight::new(d, 0)).collect();
            while flat.len() > 1 && flat.last().is_some_and(|w| w.is_zero()) {
                flat.pop();
            }
            if flat.is_empty() {
                flat.push(Weight::ZERO);
            }
            out.push(TwistLabel::from_flat(&flat));
            return;
        }
        let cap = 2 * params.modulus_at(k) - 2;
        for d in 0..=cap.min(budget / scale) {
            cur.push(d);
            rec(params, k + 1, budget - d * scale, max_height, cur, out);
            cur.pop();
        }
    }
    rec(params, 0, max_length.max(0), max_height, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(a: i64, b: i64) -> Weight {
        Weight::new(a, b)
    }

    fn lbl(s: &str) -> TwistLabel {
        s.parse().unwrap()
    }

    #[test]
    fn dominance() {
        assert!(is_dominant(w(3, 1)));
        assert!(is_dominant(w(0, 0)));
        assert!(!is_dominant(w(1, 2)));
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(5, 3).is_ok());
        assert!(Params::new(2, 3).is_ok());
        assert!(Params::new(1, 3).is_err());
        assert!(Params::new(4, 4).is_err());
        assert!(Params::new(6, 3).is_err());
        assert!(Params::new(2, 2).is_err());
    }

    #[test]
    fn regions() {
        assert_eq!(region(w(4, 0), 5).unwrap(), Region::Restricted);
        assert_eq!(region(w(8, 0), 5).unwrap(), Region::Band);
        assert_eq!(region(w(9, 0), 5).unwrap(), Region::Outside);
        assert!(region(w(0, 1), 5).is_err());
        // degenerate modulus 2: restricted {0,1}, band {1,2}
        assert!(in_restricted(1, 2) && in_band(1, 2));
        assert!(in_band(2, 2) && !in_restricted(2, 2));
    }

    #[test]
    fn steinberg_examples() {
        let p35 = Params::new(3, 5).unwrap();
        assert_eq!(
            steinberg_factorize(w(37, 0), p35).unwrap(),
            lbl("1,0;2,0;2,0")
        );
        let p53 = Params::new(5, 3).unwrap();
        assert_eq!(steinberg_factorize(w(4, 0), p53).unwrap(), lbl("4,0"));
        let p23 = Params::new(2, 3).unwrap();
        assert_eq!(steinberg_factorize(w(2, 2), p23).unwrap(), lbl("0,0;1,1"));
        assert!(steinberg_factorize(w(0, 3), p23).is_err());
    }

    #[test]
    fn lengths() {
        let p35 = Params::new(3, 5).unwrap();
        assert_eq!(length_weight(w(5, 2)), 3);
        assert_eq!(length_label(&lbl("1,0;2,0"), p35), 7);
        assert_eq!(length_label(&TwistLabel::unit(), p35), 0);
    }

    #[test]
    fn specialness() {
        let p53 = Params::new(5, 3).unwrap();
        assert!(is_special(&lbl("8,0"), p53));
        assert!(!is_special(&lbl("9,0"), p53));
        let p52 = Params::new(5, 2).unwrap();
        assert!(is_special(&lbl("4,0;2,0"), p52));
        assert!(!is_special(&lbl("4,0;3,0"), p52));
    }

    #[test]
    fn frobenius() {
        assert_eq!(frobenius_scale(w(1, 0), 5), w(5, 0));
        assert_eq!(frobenius_scale(w(1, 1), 2), w(2, 2));
        assert_eq!(frobenius_scale(w(0, 0), 7), w(0, 0));
    }

    #[test]
    fn canonical_examples() {
        let p23 = Params::new(2, 3).unwrap();
        assert_eq!(canonicalize_label(&lbl("2,2"), p23), lbl("0,0;1,1"));
        let p53 = Params::new(5, 3).unwrap();
        assert_eq!(canonicalize_label(&lbl("3,1"), p53), lbl("3,1"));
        assert_eq!(canonicalize_label(&lbl("1,0;3,3"), p23), lbl("1,0;0,0;1,1"));
    }

    #[test]
    fn negative_determinant_sits_at_height() {
        let p23 = Params::new(2, 3).unwrap();
        // both name d_q^{-2}
        assert_eq!(canonicalize_label(&lbl("0,0;-1,-1"), p23), lbl("-2,-2"));
        assert_eq!(canonicalize_label(&lbl("-2,-2"), p23), lbl("-2,-2"));
        // below the height, digits are enforced
        assert_eq!(canonicalize_label(&lbl("0,-1;1,0"), p23), lbl("2,1;0,-1"));
    }

    #[test]
    fn label_text_round_trip() {
        let l = lbl("1,0;0,0;1,1");
        assert_eq!(l.to_string(), "1,0;0,0;1,1");
        assert!("1;2".parse::<TwistLabel>().is_err());
    }

    #[test]
    fn special_label_enumeration() {
        let p = Params::new(2, 3).unwrap();
        let labels = special_labels(p, 0, None);
        assert_eq!(labels, vec![TwistLabel::unit()]);
        let labels = special_labels(p, 4, None);
        // (d, e) with d <= 2, e <= 4, d + 2e <= 4
        assert_eq!(labels.len(), 7);
        assert!(labels
            .iter()
            .all(|l| is_special(l, p) && length_label(l, p) <= 4));
        let labels = special_labels(p, 4, Some(-1));
        assert_eq!(labels.len(), 3);
    }

    fn coprime_params() -> impl Strategy<Value = Params> {
        (2i64..=13, prop::sample::select(vec![2i64, 3, 5, 7, 11, 13]))
            .prop_filter_map("coprime", |(l, p)| Params::new(l, p).ok())
    }

    proptest! {
        #[test]
        fn steinberg_recomposes(d in 0i64..=1000, b in -20i64..20, params in coprime_params()) {
            let wt = w(d + b, b);
            let l = steinberg_factorize(wt, params).unwrap();
            prop_assert!(is_special(&l, params));
            prop_assert_eq!(recompose(&l, params), wt);
            prop_assert_eq!(length_label(&l, params), length_weight(wt));
            // canonical digits below the height
            let flat = l.flat();
            let top = (l.height() + 1) as usize;
            for (k, u) in flat.iter().enumerate().take(top) {
                prop_assert!(u.b >= 0 && u.b < params.modulus_at(k));
            }
        }

        #[test]
        fn canonicalize_idempotent(
            q in (0i64..12, -6i64..6),
            lv in prop::collection::vec((0i64..6, -4i64..8), 0..3),
            params in coprime_params(),
        ) {
            let l = TwistLabel::new(w(q.0 + q.1, q.1), lv.iter().map(|&(d, b)| w(d + b, b)).collect());
            let c = canonicalize_label(&l, params);
            prop_assert_eq!(canonicalize_label(&c, params), c.clone());
            prop_assert_eq!(determinant_degree(&c, params), determinant_degree(&l, params));
            prop_assert_eq!(length_label(&c, params), length_label(&l, params));
        }

        #[test]
        fn regions_partition(d in 0i64..100, m in 2i64..14) {
            let r = in_restricted(d, m);
            let b = in_band(d, m);
            let both = d == m - 1;
            prop_assert_eq!(r && b, both);
            prop_assert_eq!(in_pi(d, m), r || b);
        }
    }
}
