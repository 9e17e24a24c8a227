//! Squarefreeness in the main variable over the fraction field of
//! `Z[d_q, d]`, by a subresultant remainder sequence over `Z[d_q, d]`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::jpoly::JPoly;

/// Polynomial in `(d_q, d)` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct MPoly(BTreeMap<(u32, u32), BigInt>);

impl MPoly {
    fn one() -> Self {
        MPoly(BTreeMap::from([((0, 0), BigInt::one())]))
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, e: (u32, u32), c: BigInt) {
        if c.is_zero() {
            return;
        }
        let v = self.0.entry(e).or_insert_with(BigInt::zero);
        *v += c;
        if v.is_zero() {
            self.0.remove(&e);
        }
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::default();
        for (a, x) in &self.0 {
            for (b, y) in &o.0 {
                out.add_term((a.0 + b.0, a.1 + b.1), x * y);
            }
        }
        out
    }

    fn sub(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.0 {
            out.add_term(*e, -c);
        }
        out
    }

    fn pow(&self, e: u32) -> MPoly {
        (0..e).fold(MPoly::one(), |acc, _| acc.mul(self))
    }

    /// Leading term in lex order.
    fn lead(&self) -> Option<((u32, u32), &BigInt)> {
        self.0.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// `self / o`, which must be exact.
    fn div_exact(&self, o: &MPoly) -> MPoly {
        let (le, lc) = o.lead().expect("division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = MPoly::default();
        while let Some((e, c)) = rem.lead() {
            assert!(e.0 >= le.0 && e.1 >= le.1, "inexact division");
            let (q, r) = c.div_rem(lc);
            assert!(r.is_zero(), "inexact division");
            let t = MPoly(BTreeMap::from([((e.0 - le.0, e.1 - le.1), q)]));
            rem = rem.sub(&t.mul(o));
            quot = MPoly(quot.0.into_iter().chain(t.0).collect());
        }
        quot
    }
}

/// Univariate polynomial in the main variable, coefficient `i` at index `i`,
/// no trailing zeros.
type UPoly = Vec<MPoly>;

fn from_jpoly(f: &JPoly) -> UPoly {
    let mut out: UPoly = vec![MPoly::default(); f.degree().map_or(0, |d| d as usize + 1)];
    for (&(w, i, j), c) in f.terms() {
        out[w as usize].add_term((i, j), c.clone());
    }
    out
}

fn trim(mut f: UPoly) -> UPoly {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

/// Pseudo-remainder of `a` by `b`: `lc(b)^(deg a - deg b + 1) a mod b`.
fn prem(a: &UPoly, b: &UPoly) -> UPoly {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    let mut steps = a.len() - b.len() + 1;
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&bc.mul(&lr));
        }
        r = trim(r);
        steps -= 1;
    }
    // remaining factors of lc(b) keep the pseudo-remainder exact
    let f = lb.pow(steps as u32);
    r.into_iter().map(|c| c.mul(&f)).collect()
}

/// Degree of `gcd(f, g)` over the fraction field of the coefficients.
fn gcd_degree(f: &UPoly, g: &UPoly) -> usize {
    let (mut a, mut b) = if f.len() >= g.len() {
        (f.clone(), g.clone())
    } else {
        (g.clone(), f.clone())
    };
    if b.is_empty() {
        return a.len().saturating_sub(1);
    }
    let mut gg = MPoly::one();
    let mut h = MPoly::one();
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            return b.len() - 1;
        }
        if r.len() == 1 {
            return 0;
        }
        let den = gg.mul(&h.pow(delta));
        a = b;
        b = r.into_iter().map(|c| c.div_exact(&den)).collect();
        gg = a.last().unwrap().clone();
        h = match delta {
            0 => h,
            1 => gg.clone(),
            _ => gg.pow(delta).div_exact(&h.pow(delta - 1)),
        };
    }
}

/// True iff `f` and `f'` are coprime in `K[ω]`, `K` the fraction field of
/// `Z[d_q, d]`. Nonzero constants count as squarefree.
pub fn squarefree_check(f: &JPoly) -> bool {
    assert!(!f.is_zero(), "squarefree_check of the zero polynomial");
    if f.degree() == Some(0) {
        return true;
    }
    gcd_degree(&from_jpoly(f), &from_jpoly(&f.derivative())) == 0
}
