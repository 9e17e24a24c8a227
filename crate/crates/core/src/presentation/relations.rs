//! Polynomials in `X_-1, X_0, ..., X_n` over `Z[d_q^±, d^±]`, the map `Φ`
//! into the label basis and the kernel relations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::jpoly::{cheb_p, cheb_q, dickson_g, dickson_h, JPoly};
use crate::error::{Error, Result};
use crate::fusion::{multiply, ClassVector};
use crate::lattice::{Params, TwistLabel, Weight};

/// `D_q^dq D^d Π X_{i-1}^{x[i]}`; `x` has no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PMono {
    pub x: Vec<u32>,
    pub dq: i64,
    pub d: i64,
}

impl PMono {
    fn mul(&self, o: &PMono) -> PMono {
        let n = self.x.len().max(o.x.len());
        let x = (0..n)
            .map(|i| self.x.get(i).copied().unwrap_or(0) + o.x.get(i).copied().unwrap_or(0))
            .collect();
        PMono {
            x,
            dq: self.dq + o.dq,
            d: self.d + o.d,
        }
    }

    /// `ln` of the `X`-part: `e_-1 + ℓ Σ p^i e_i`.
    pub fn x_length(&self, params: Params) -> i64 {
        self.x
            .iter()
            .enumerate()
            .map(|(k, &e)| params.scale_at(k) * e as i64)
            .sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationPoly {
    #[serde(with = "term_list")]
    terms: BTreeMap<PMono, BigInt>,
}

mod term_list {
    use super::*;
    use crate::serde_int::IntRepr;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<PMono, BigInt>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|(k, c)| (&k.x, k.dq, k.d, IntRepr::from(c))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<PMono, BigInt>, D::Error> {
        let raw: Vec<(Vec<u32>, i64, i64, IntRepr)> = Vec::deserialize(d)?;
        let mut out = PresentationPoly::zero();
        for (x, dq, dd, c) in raw {
            out.add_term(PMono { x, dq, d: dd }, c.into_bigint()?);
        }
        Ok(out.terms)
    }
}

impl PresentationPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(PMono::default(), BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::monomial(PMono::default(), c)
    }

    pub fn monomial(m: PMono, c: BigInt) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    /// `X_i` for `i >= -1`.
    pub fn var(i: i64) -> Self {
        assert!(i >= -1, "no variable X_{i}");
        let mut x = vec![0; (i + 2) as usize];
        x[(i + 1) as usize] = 1;
        Self::monomial(PMono { x, dq: 0, d: 0 }, BigInt::one())
    }

    /// `D_q^dq D^d`.
    pub fn det(dq: i64, d: i64) -> Self {
        Self::monomial(
            PMono {
                x: Vec::new(),
                dq,
                d,
            },
            BigInt::one(),
        )
    }

    pub fn add_term(&mut self, mut m: PMono, c: BigInt) {
        while m.x.last() == Some(&0) {
            m.x.pop();
        }
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PMono, &BigInt)> {
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

    pub fn scalar(&self, k: &BigInt) -> Self {
        self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Highest `i` with `X_i` present, `-2` if none.
    pub fn max_var(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.x.len() as i64 - 2)
            .max()
            .unwrap_or(-2)
    }

    /// `f(ω, d_q, d) ↦ f(x, dq, d)`.
    pub fn substitute(f: &JPoly, x: &Self, dq: &Self, d: &Self) -> Self {
        let mut out = Self::zero();
        for (&(w, i, j), c) in f.terms() {
            out = &out + &(&(&x.pow(w) * &dq.pow(i)) * &d.pow(j)).scalar(c);
        }
        out
    }
}

impl FromIterator<(PMono, BigInt)> for PresentationPoly {
    fn from_iter<I: IntoIterator<Item = (PMono, BigInt)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (m, c) in iter {
            out.add_term(m, c);
        }
        out
    }
}

impl Add for &PresentationPoly {
    type Output = PresentationPoly;
    fn add(self, o: &PresentationPoly) -> PresentationPoly {
        self.terms
            .iter()
            .chain(o.terms.iter())
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }
}

impl Neg for &PresentationPoly {
    type Output = PresentationPoly;
    fn neg(self) -> PresentationPoly {
        self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect()
    }
}

impl Sub for &PresentationPoly {
    type Output = PresentationPoly;
    fn sub(self, o: &PresentationPoly) -> PresentationPoly {
        self + &-o
    }
}

impl Mul for &PresentationPoly {
    type Output = PresentationPoly;
    fn mul(self, o: &PresentationPoly) -> PresentationPoly {
        let mut out = PresentationPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }
}

impl fmt::Display for PresentationPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.sign() == num_bigint::Sign::Minus;
            let abs = if neg { -c } else { c.clone() };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            for (name, e) in [("Dq", m.dq), ("D", m.d)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            for (k, &e) in m.x.iter().enumerate() {
                let name = format!("X{}", k as i64 - 1);
                match e {
                    0 => {}
                    1 => parts.push(name),
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

/// Image of `X_i`: `T(1,0)` at level `i` (the quantum level for `i = -1`).
pub fn generator_label(i: i64) -> TwistLabel {
    let mut flat = vec![Weight::ZERO; (i + 2) as usize];
    flat[(i + 1) as usize] = Weight::new(1, 0);
    TwistLabel::from_flat(&flat)
}

/// Evaluates `Φ`, memoizing the images of `X`-monomials.
pub struct PhiEvaluator {
    params: Params,
    memo: HashMap<Vec<u32>, ClassVector>,
}

impl PhiEvaluator {
    pub fn new(params: Params) -> Self {
        PhiEvaluator {
            params,
            memo: HashMap::from([(Vec::new(), ClassVector::unit())]),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// Image of `Π X_{i-1}^{x[i]}`.
    pub fn x_monomial(&mut self, x: &[u32]) -> Result<ClassVector> {
        let x = &x[..x.iter().rposition(|&e| e > 0).map_or(0, |k| k + 1)];
        if let Some(v) = self.memo.get(x) {
            return Ok(v.clone());
        }
        let k = x
            .iter()
            .rposition(|&e| e > 0)
            .expect("nonempty monomial is memoized");
        let mut rest = x.to_vec();
        rest[k] -= 1;
        while rest.last() == Some(&0) {
            rest.pop();
        }
        let lower = self.x_monomial(&rest)?;
        let gen = ClassVector::basis(generator_label(k as i64 - 1));
        let v = multiply(&lower, &gen, self.params)?;
        self.memo.insert(x.to_vec(), v.clone());
        Ok(v)
    }

    /// `D_q^dq D^d` acts as the twist by `dq + ℓ d` at the quantum level.
    pub fn monomial(&mut self, m: &PMono) -> Result<ClassVector> {
        let v = self.x_monomial(&m.x)?;
        Ok(v.twist(m.dq + self.params.ell() * m.d, self.params))
    }

    pub fn eval(&mut self, f: &PresentationPoly) -> Result<ClassVector> {
        let mut out = ClassVector::zero();
        for (m, c) in f.terms() {
            out.add_scaled(&self.monomial(m)?, c);
        }
        Ok(out)
    }
}

/// `Φ(f)` in the label basis.
pub fn phi_eval(f: &PresentationPoly, params: Params) -> Result<ClassVector> {
    PhiEvaluator::new(params).eval(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub poly: PresentationPoly,
}

fn level_det(params: Params, i: i64) -> PresentationPoly {
    PresentationPoly::det(0, params.p().pow(i as u32))
}

/// `P_{ℓ-1}(X_-1) (X_0 - g(X_-1))`.
pub fn quantum_relation(params: Params) -> PresentationPoly {
    let l = params.ell() as u32;
    let (x, y, dq) = (
        PresentationPoly::var(-1),
        PresentationPoly::var(0),
        PresentationPoly::det(1, 0),
    );
    let one = PresentationPoly::one();
    let pf = PresentationPoly::substitute(&cheb_p(l - 1), &x, &dq, &one);
    let g = PresentationPoly::substitute(&dickson_g(l), &x, &dq, &one);
    &pf * &(&y - &g)
}

/// `Q_{p-1}(X_i) (X_{i+1} - h(X_i))`, with the level-`i` determinant `D^(p^i)`.
pub fn classical_relation(params: Params, i: i64) -> PresentationPoly {
    let p = params.p() as u32;
    let (x, y, d) = (
        PresentationPoly::var(i),
        PresentationPoly::var(i + 1),
        level_det(params, i),
    );
    let one = PresentationPoly::one();
    let qf = PresentationPoly::substitute(&cheb_q(p - 1), &x, &one, &d);
    let h = PresentationPoly::substitute(&dickson_h(p), &x, &one, &d);
    &qf * &(&y - &h)
}

/// `D_q^ℓ - D`.
pub fn determinant_relation(params: Params) -> PresentationPoly {
    &PresentationPoly::det(params.ell(), 0) - &PresentationPoly::det(0, 1)
}

/// `D_q^ℓ - D^ℓ`, the relation read literally; not in the kernel.
pub fn literal_determinant_relation(params: Params) -> PresentationPoly {
    &PresentationPoly::det(params.ell(), 0) - &PresentationPoly::det(0, params.ell())
}

/// Generators of the kernel of `Φ_n`. Empty for `n = -1`.
pub fn kernel_generators(params: Params, n: i64) -> Result<Vec<Relation>> {
    if n < -1 {
        return Err(Error::InvalidParams(format!("n must be >= -1, got {n}")));
    }
    if n == -1 {
        return Ok(Vec::new());
    }
    let mut out = vec![Relation {
        name: "P_{l-1}(X-1)*(X0 - g(X-1))".into(),
        poly: quantum_relation(params),
    }];
    for i in 0..n {
        out.push(Relation {
            name: format!("Q_{{p-1}}(X{i})*(X{} - h(X{i}))", i + 1),
            poly: classical_relation(params, i),
        });
    }
    out.push(Relation {
        name: "Dq^l - D".into(),
        poly: determinant_relation(params),
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermImage {
    pub monomial: PMono,
    #[serde(with = "crate::serde_int")]
    pub coeff: BigInt,
    pub image: ClassVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    pub poly: String,
    pub terms: Vec<TermImage>,
    pub image: ClassVector,
    pub vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub params: Params,
    pub n: i64,
    pub generators: Vec<RelationCheck>,
    /// `D_q^ℓ - D^ℓ`; expected not to vanish.
    pub literal_variant: RelationCheck,
    pub pass: bool,
}

fn check_relation(ev: &mut PhiEvaluator, r: &Relation) -> Result<RelationCheck> {
    let mut terms = Vec::with_capacity(r.poly.len());
    let mut image = ClassVector::zero();
    for (m, c) in r.poly.terms() {
        let v = ev.monomial(m)?;
        image.add_scaled(&v, c);
        terms.push(TermImage {
            monomial: m.clone(),
            coeff: c.clone(),
            image: v,
        });
    }
    Ok(RelationCheck {
        name: r.name.clone(),
        poly: r.poly.to_string(),
        terms,
        vanishes: image.is_zero(),
        image,
    })
}

/// `Φ` of every kernel generator, with per-term images.
pub fn verify_kernel(params: Params, n: i64) -> Result<KernelReport> {
    let mut ev = PhiEvaluator::new(params);
    let generators = kernel_generators(params, n)?
        .iter()
        .map(|r| check_relation(&mut ev, r))
        .collect::<Result<Vec<_>>>()?;
    let literal = Relation {
        name: "Dq^l - D^l".into(),
        poly: literal_determinant_relation(params),
    };
    let literal_variant = check_relation(&mut ev, &literal)?;
    let pass = generators.iter().all(|g| g.vanishes);
    Ok(KernelReport {
        params,
        n,
        generators,
        literal_variant,
        pass,
    })
}
