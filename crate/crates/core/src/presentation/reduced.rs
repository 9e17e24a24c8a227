//! Evidence that the presented ring is reduced, and the nonzerodivisor test
//! for `X_-1 - b`.
//!
//! For `n = 0` the kernel is principal, generated by
//! `f = P_{ℓ-1}(x)(y - g(x))`; the second factor is linear in `y` and the
//! first is `y`-free, so `(f)` is radical iff `P_{ℓ-1}` is squarefree. That
//! case is decided exactly.
//!
//! For `n = 1` the two generators cut out four components. Points on each
//! are built over a prime field `F_q` with `q ≡ 1 mod 2ℓp` from the
//! factorisations `P_{ℓ-1} = Π (ω - (ζ^a + 1) t)`, `ζ^ℓ = 1`, and the
//! Dickson parametrisation `g(t1 + t2) = t1^ℓ + t2^ℓ`, and the Jacobian is
//! tested for full rank there. This is evidence, not proof.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::jpoly::{cheb_p, cheb_q, dickson_g, dickson_h, mulmod, powmod, JPoly};
use super::squarefree::squarefree_check;
use crate::error::{Error, Result};
use crate::lattice::{is_prime, Params};

/// Samples per component in the `n = 1` Jacobian test.
pub const SAMPLES_PER_COMPONENT: usize = 24;

/// Verdict for a principal ideal `(F(x) (y - G(x)))` in `K[x, y]`.
pub fn principal_radical_verdict(first_factor: &JPoly) -> bool {
    squarefree_check(first_factor)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSamples {
    pub component: String,
    pub samples: usize,
    pub full_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadicalReport {
    pub params: Params,
    pub n: i64,
    pub seed: u64,
    pub p_squarefree: bool,
    pub q_squarefree: Option<bool>,
    /// True when the verdict is exact rather than sampled.
    pub exact: bool,
    /// Field used for the Jacobian samples.
    pub field: Option<u64>,
    pub components: Vec<ComponentSamples>,
    /// The same `n = 0` test with `P_{ℓ-1}^2` substituted; must be false.
    pub negative_control: bool,
    pub radical: bool,
}

fn inv(a: u64, q: u64) -> u64 {
    powmod(a, q - 2, q)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest prime `q > 2^30` with `q ≡ 1 mod m`.
fn field_prime(m: u64) -> u64 {
    let mut q = ((1u64 << 30) / m + 1) * m + 1;
    while !is_prime(q as i64) {
        q += m;
    }
    q
}

/// An element of exact multiplicative order `m` in `F_q`.
fn root_of_unity(q: u64, m: u64, rng: &mut ChaCha8Rng) -> u64 {
    let fs = prime_factors(m);
    loop {
        let g = rng.gen_range(2..q - 1);
        let z = powmod(g, (q - 1) / m, q);
        if fs.iter().all(|&r| powmod(z, m / r, q) != 1) {
            return z;
        }
    }
}

struct Field {
    q: u64,
    zeta: u64,
    xi: u64,
    eta: u64,
}

impl Field {
    fn nonzero(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(1..self.q)
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.q)
    }
}

struct Family {
    p: JPoly,
    g: JPoly,
    q: JPoly,
    h: JPoly,
}

/// Rank of the Jacobian of `(f1, f2)` in `(x, y, z)` at a point is 2.
fn jacobian_full_rank(fam: &Family, k: &Field, pt: (u64, u64, u64), dq: u64, d: u64) -> bool {
    let q = k.q;
    let (x, y, z) = pt;
    let e = |f: &JPoly, w: u64| f.eval_mod(q, w, dq, d);
    let (px, gx) = (e(&fam.p, x), e(&fam.g, x));
    let (qy, hy) = (e(&fam.q, y), e(&fam.h, y));
    let (dp, dg) = (e(&fam.p.derivative(), x), e(&fam.g.derivative(), x));
    let (dqq, dh) = (e(&fam.q.derivative(), y), e(&fam.h.derivative(), y));
    // rows: grad f1 = (P'(y-g) - P g', P, 0), grad f2 = (0, Q'(z-h) - Q h', Q)
    let f1x = k.sub(k.mul(dp, k.sub(y, gx)), k.mul(px, dg));
    let f1y = px;
    let f2y = k.sub(k.mul(dqq, k.sub(z, hy)), k.mul(qy, dh));
    let f2z = qy;
    let m_xy = k.mul(f1x, f2y);
    let m_xz = k.mul(f1x, f2z);
    let m_yz = k.mul(f1y, f2z);
    debug_assert_eq!(k.mul(px, k.sub(y, gx)), 0);
    debug_assert_eq!(k.mul(qy, k.sub(z, hy)), 0);
    m_xy != 0 || m_xz != 0 || m_yz != 0
}

fn sample_components(params: Params, rng: &mut ChaCha8Rng) -> (u64, Vec<ComponentSamples>) {
    let (l, p) = (params.ell() as u64, params.p() as u64);
    let q = field_prime(2 * l * p);
    let k = Field {
        q,
        zeta: root_of_unity(q, l, rng),
        xi: root_of_unity(q, p, rng),
        eta: root_of_unity(q, 2 * l, rng),
    };
    let fam = Family {
        p: cheb_p(l as u32 - 1),
        g: dickson_g(l as u32),
        q: cheb_q(p as u32 - 1),
        h: dickson_h(p as u32),
    };
    let eval = |f: &JPoly, w: u64, dq: u64, d: u64| f.eval_mod(q, w, dq, d);
    // a root of P_{ℓ-1}: t1 = ζ^a t2, ω = t1 + t2, d_q = t1 t2
    let p_root = |rng: &mut ChaCha8Rng| {
        let t2 = k.nonzero(rng);
        let a = rng.gen_range(1..l);
        let t1 = k.mul(powmod(k.zeta, a, q), t2);
        (k.add(t1, t2), k.mul(t1, t2))
    };
    let q_root = |rng: &mut ChaCha8Rng| {
        let u2 = k.nonzero(rng);
        let c = rng.gen_range(1..p);
        let u1 = k.mul(powmod(k.xi, c, q), u2);
        (k.add(u1, u2), k.mul(u1, u2))
    };
    let mut comps = Vec::new();
    let mut run = |name: &str,
                   rng: &mut ChaCha8Rng,
                   f: &dyn Fn(&mut ChaCha8Rng) -> ((u64, u64, u64), u64, u64)| {
        let full = (0..SAMPLES_PER_COMPONENT)
            .filter(|_| {
                let (pt, dq, d) = f(rng);
                jacobian_full_rank(&fam, &k, pt, dq, d)
            })
            .count();
        comps.push(ComponentSamples {
            component: name.into(),
            samples: SAMPLES_PER_COMPONENT,
            full_rank: full,
        });
    };
    run("P(x) = 0, Q(y) = 0", rng, &|rng| {
        let (x, dq) = p_root(rng);
        let (y, d) = q_root(rng);
        ((x, y, k.nonzero(rng)), dq, d)
    });
    run("P(x) = 0, z = h(y)", rng, &|rng| {
        let (x, dq) = p_root(rng);
        let (y, d) = (k.nonzero(rng), k.nonzero(rng));
        ((x, y, eval(&fam.h, y, dq, d)), dq, d)
    });
    run("y = g(x), Q(y) = 0", rng, &|rng| {
        if p == 2 {
            // Q_1 = υ: need t1^ℓ = -t2^ℓ, so t1 = η^(odd) t2 with η of order 2ℓ
            let t2 = k.nonzero(rng);
            let t1 = k.mul(powmod(k.eta, 2 * rng.gen_range(0..l) + 1, q), t2);
            let (x, dq) = (k.add(t1, t2), k.mul(t1, t2));
            return (
                (x, eval(&fam.g, x, dq, 0), k.nonzero(rng)),
                dq,
                k.nonzero(rng),
            );
        }
        loop {
            let (t1, t2) = (k.nonzero(rng), k.nonzero(rng));
            let (x, dq) = (k.add(t1, t2), k.mul(t1, t2));
            let y = eval(&fam.g, x, dq, 0);
            if y == 0 {
                continue;
            }
            // y = u2 (1 + ξ^c), d = ξ^c u2^2
            let xc = powmod(k.xi, rng.gen_range(1..p), q);
            let u2 = k.mul(y, inv(k.add(1, xc), q));
            return ((x, y, k.nonzero(rng)), dq, k.mul(xc, k.mul(u2, u2)));
        }
    });
    run("y = g(x), z = h(y)", rng, &|rng| {
        let (x, dq, d) = (k.nonzero(rng), k.nonzero(rng), k.nonzero(rng));
        let y = eval(&fam.g, x, dq, d);
        ((x, y, eval(&fam.h, y, dq, d)), dq, d)
    });
    (q, comps)
}

/// Reducedness evidence for `n ∈ {0, 1}`.
pub fn radical_evidence(params: Params, n: i64, seed: u64) -> Result<RadicalReport> {
    if !(0..=1).contains(&n) {
        return Err(Error::InvalidParams(format!(
            "radical_evidence supports n = 0 or 1, got {n}"
        )));
    }
    let pf = cheb_p(params.ell() as u32 - 1);
    let p_squarefree = principal_radical_verdict(&pf);
    let negative_control = principal_radical_verdict(&pf.pow(2));
    if n == 0 {
        return Ok(RadicalReport {
            params,
            n,
            seed,
            p_squarefree,
            q_squarefree: None,
            exact: true,
            field: None,
            components: Vec::new(),
            negative_control,
            radical: p_squarefree,
        });
    }
    let q_squarefree = squarefree_check(&cheb_q(params.p() as u32 - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (field, components) = sample_components(params, &mut rng);
    let sampled = components.iter().all(|c| c.full_rank == c.samples);
    Ok(RadicalReport {
        params,
        n,
        seed,
        p_squarefree,
        q_squarefree: Some(q_squarefree),
        exact: false,
        field: Some(field),
        components,
        negative_control,
        radical: p_squarefree && q_squarefree && sampled,
    })
}

/// `d_q` values never used for the truncation test.
pub const DQ_DENYLIST: &[i64] = &[0];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonzerodivisorReport {
    pub b: i64,
    pub l: i64,
    pub seed: u64,
    /// `P_{ℓ-1}(b)` as a polynomial in `d_q`.
    pub p_at_b: JPoly,
    pub polynomial_test: bool,
    /// Specialized `d_q` and the injectivity verdict, when the truncation
    /// test ran.
    pub dq: Option<String>,
    pub injective_on_truncation: Option<bool>,
    pub nonzerodivisor: bool,
}

/// Rank of a dense rational matrix by elimination.
fn rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = m[r][c].recip();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let t = &f * &m[r][j];
                m[i][j] -= t;
            }
        }
        r += 1;
    }
    r
}

/// Multiplication by `x - b` on `span{x^i y^k : i <= 2ℓ-2, k <= 3}` inside
/// `Q[x, y] / (P_{ℓ-1}(x)(y - g(x)))` with `d_q` specialized, injective?
///
/// `-f` is monic of degree `2ℓ-1` in `x`, so `{x^i y^k : i <= 2ℓ-2}` is a
/// basis of the quotient and `x^(2ℓ-1) = x^(2ℓ-1) + f` reduces the overflow.
fn truncation_injective(ell: u32, b: i64, dq: &BigRational) -> bool {
    let n = (2 * ell - 1) as usize; // x-degrees 0..n-1 in the quotient
    let eval = |f: &JPoly| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); f.degree().map_or(0, |d| d as usize + 1)];
        for (&(w, i, _), c) in f.terms() {
            out[w as usize] += BigRational::from_integer(c.clone()) * dq.pow(i as i32);
        }
        out
    };
    let pf = eval(&cheb_p(ell - 1));
    let pg = {
        let g = eval(&dickson_g(ell));
        let mut out = vec![BigRational::zero(); pf.len() + g.len() - 1];
        for (i, a) in pf.iter().enumerate() {
            for (j, c) in g.iter().enumerate() {
                out[i + j] += a * c;
            }
        }
        out
    };
    // x^n ≡ x^n - P g + P y: the x^n terms cancel
    let mut xn_x = vec![BigRational::zero(); n];
    for (i, c) in pg.iter().enumerate().take(n) {
        xn_x[i] = -c;
    }
    let xn_y = pf.clone();
    let ydeg = 5; // y-degrees 0..=4 after one multiplication by x
    let idx = |i: usize, k: usize| k * n + i;
    let mut cols = Vec::new();
    for k in 0..=3 {
        for i in 0..n {
            // (x - b) x^i y^k
            let mut v = vec![BigRational::zero(); n * ydeg];
            v[idx(i, k)] -= BigRational::from_integer(BigInt::from(b));
            if i + 1 < n {
                v[idx(i + 1, k)] += BigRational::one();
            } else {
                for (j, c) in xn_x.iter().enumerate() {
                    v[idx(j, k)] -= c;
                }
                for (j, c) in xn_y.iter().enumerate() {
                    v[idx(j, k + 1)] += c;
                }
            }
            cols.push(v);
        }
    }
    rank(cols.clone()) == cols.len()
}

/// Whether `X_-1 - b` is a nonzerodivisor for the `n = 0` presentation.
///
/// Decided by `P_{ℓ-1}(b) ≠ 0` in `Z[d_q]`. The truncation injectivity test
/// runs as well for `ℓ <= 5`, and whenever the polynomial is zero.
pub fn nonzerodivisor_probe(b: i64, ell: i64, seed: u64) -> Result<NonzerodivisorReport> {
    if ell < 2 {
        return Err(Error::InvalidParams(format!("l must be >= 2, got {ell}")));
    }
    let p_at_b = cheb_p(ell as u32 - 1).eval_main(&BigInt::from(b));
    let polynomial_test = !p_at_b.is_zero();
    let (dq, injective) = if ell <= 5 || !polynomial_test {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dq = loop {
            let num: i64 = rng.gen_range(-50..=50);
            let den: i64 = rng.gen_range(1..=20);
            if num % den != 0 || !DQ_DENYLIST.contains(&(num / den)) {
                break BigRational::new(num.into(), den.into());
            }
        };
        let inj = truncation_injective(ell as u32, b, &dq);
        (Some(dq.to_string()), Some(inj))
    } else {
        (None, None)
    };
    let nonzerodivisor = if polynomial_test {
        injective.unwrap_or(true)
    } else {
        injective == Some(true)
    };
    Ok(NonzerodivisorReport {
        b,
        l: ell,
        seed,
        p_at_b,
        polynomial_test,
        dq,
        injective_on_truncation: injective,
        nonzerodivisor,
    })
}
