//! Reachability of the special basis from monomials in the generators.
//!
//! The ring is graded by character degree: `T(λ)` sits in degree
//! `length(λ) + 2 det(λ)`, and `Φ(D_q^k X^α)` in degree `ln(α) + 2k`. Since
//! `D_q` is a unit it suffices to reach each determinant-free special label
//! `λ` of degree `L = length(λ)` from the monomials `D_q^k X^α` with
//! `ln(α) + 2k = L`, `k >= 0`. Each degree is solved by exact elimination
//! over the rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::relations::{PMono, PhiEvaluator};
use crate::error::{Error, Result};
use crate::fusion::ClassVector;
use crate::lattice::{length_label, special_labels, Params, TwistLabel};

type QVec = BTreeMap<TwistLabel, BigRational>;

/// Rows with pairwise distinct leading labels, each normalized to leading
/// coefficient 1, plus the column combination producing each row.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<TwistLabel, (QVec, BTreeMap<usize, BigRational>)>,
}

fn axpy(y: &mut QVec, a: &BigRational, x: &QVec) {
    for (k, v) in x {
        let e = y.entry(k.clone()).or_insert_with(BigRational::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

fn axpy_combo(
    y: &mut BTreeMap<usize, BigRational>,
    a: &BigRational,
    x: &BTreeMap<usize, BigRational>,
) {
    for (k, v) in x {
        let e = y.entry(*k).or_insert_with(BigRational::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

impl Echelon {
    /// Reduce `v` by leading terms; returns the residue and the combination
    /// subtracted so far.
    fn reduce(
        &self,
        mut v: QVec,
        mut combo: BTreeMap<usize, BigRational>,
    ) -> (QVec, BTreeMap<usize, BigRational>) {
        while let Some((lead, c)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
            let Some((row, rc)) = self.rows.get(&lead) else {
                break;
            };
            let a = -c;
            axpy(&mut v, &a, row);
            axpy_combo(&mut combo, &a, rc);
        }
        (v, combo)
    }

    fn insert(&mut self, v: QVec, col: usize) {
        let (v, combo) = self.reduce(v, BTreeMap::from([(col, BigRational::one())]));
        let Some((lead, c)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            return;
        };
        let inv = c.recip();
        let v = v.into_iter().map(|(k, x)| (k, x * &inv)).collect();
        let combo = combo.into_iter().map(|(k, x)| (k, x * &inv)).collect();
        self.rows.insert(lead, (v, combo));
    }

    /// Combination of columns equal to `e_target`, if any.
    fn solve(&self, target: &TwistLabel) -> Option<BTreeMap<usize, BigRational>> {
        let v = QVec::from([(target.clone(), BigRational::one())]);
        let (rest, combo) = self.reduce(v, BTreeMap::new());
        rest.is_empty()
            .then(|| combo.into_iter().map(|(k, x)| (k, -x)).collect())
    }
}

fn to_qvec(v: &ClassVector) -> QVec {
    v.iter()
        .map(|(l, c)| (l.clone(), BigRational::from_integer(c.clone())))
        .collect()
}

/// `X`-exponent vectors over `X_-1..X_n` with `ln(α) <= bound`.
fn x_monomials(params: Params, n: i64, bound: i64) -> Vec<Vec<u32>> {
    let vars = (n + 2) as usize;
    let mut out = Vec::new();
    let mut cur = vec![0u32; vars];
    fn rec(params: Params, k: usize, budget: i64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == cur.len() {
            let mut x = cur.clone();
            while x.last() == Some(&0) {
                x.pop();
            }
            out.push(x);
            return;
        }
        let s = params.scale_at(k);
        for e in 0..=budget / s {
            cur[k] = e as u32;
            rec(params, k + 1, budget - e * s, cur, out);
        }
        cur[k] = 0;
    }
    rec(params, 0, bound, &mut cur, &mut out);
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub label: TwistLabel,
    /// `(monomial, coefficient)` with rational coefficients as strings.
    pub combination: Vec<(PMono, String)>,
    pub integral: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityReport {
    pub params: Params,
    pub n: i64,
    pub length_bound: i64,
    pub targets: usize,
    pub monomials: usize,
    pub witnesses: Vec<Witness>,
    pub unreached: Vec<TwistLabel>,
    pub non_integral: Vec<TwistLabel>,
    pub pass: bool,
}

/// Express every special determinant-free label of height `<= n` and length
/// `<= length_bound` through `Φ` of monomials in `X_-1..X_n` and `D_q`.
pub fn surjectivity_probe(params: Params, n: i64, length_bound: i64) -> Result<SurjectivityReport> {
    if n < -1 {
        return Err(Error::InvalidParams(format!("n must be >= -1, got {n}")));
    }
    let targets = special_labels(params, length_bound, Some(n));
    let by_degree: BTreeMap<i64, Vec<TwistLabel>> =
        targets.iter().fold(BTreeMap::new(), |mut m, t| {
            m.entry(length_label(t, params))
                .or_insert_with(Vec::new)
                .push(t.clone());
            m
        });
    let monos = x_monomials(params, n, length_bound);
    let mut ev = PhiEvaluator::new(params);
    let mut witnesses = Vec::new();
    let mut unreached = Vec::new();
    let mut non_integral = Vec::new();
    let mut used = BTreeSet::new();
    for (&deg, wanted) in &by_degree {
        let mut cols = Vec::new();
        for x in monos.iter() {
            let m = PMono {
                x: x.clone(),
                dq: 0,
                d: 0,
            };
            let len = m.x_length(params);
            if len <= deg && (deg - len) % 2 == 0 {
                cols.push(PMono {
                    dq: (deg - len) / 2,
                    ..m
                });
            }
        }
        let mut ech = Echelon::default();
        for (j, m) in cols.iter().enumerate() {
            ech.insert(to_qvec(&ev.monomial(m)?), j);
        }
        for t in wanted {
            match ech.solve(t) {
                None => unreached.push(t.clone()),
                Some(combo) => {
                    let integral = combo.values().all(|c| c.is_integer());
                    if !integral {
                        non_integral.push(t.clone());
                    }
                    used.extend(combo.keys().map(|&j| cols[j].clone()));
                    witnesses.push(Witness {
                        label: t.clone(),
                        combination: combo
                            .into_iter()
                            .map(|(j, c)| (cols[j].clone(), c.to_string()))
                            .collect(),
                        integral,
                    });
                }
            }
        }
    }
    let pass = unreached.is_empty();
    Ok(SurjectivityReport {
        params,
        n,
        length_bound,
        targets: targets.len(),
        monomials: used.len(),
        witnesses,
        unreached,
        non_integral,
        pass,
    })
}

/// Integer form of a witness combination, if integral.
pub fn integral_combination(w: &Witness) -> Option<Vec<(PMono, BigInt)>> {
    w.combination
        .iter()
        .map(|(m, c)| c.parse::<BigInt>().ok().map(|c| (m.clone(), c)))
        .collect()
}
