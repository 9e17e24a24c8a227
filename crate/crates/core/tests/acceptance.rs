//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails on any FAIL except an `expected_failure`: criterion 8 asks
//! for `X_-1 - b` to be a nonzerodivisor for every `b`, but for even `ℓ` the
//! polynomial `P_{ℓ-1}` is odd, `P_{ℓ-1} = X_-1 R`, and `X_-1 · R (X_0 - g)`
//! is the relation while `R (X_0 - g)` is nonzero in the quotient. That
//! criterion is reported FAIL, and the run fails unless the failing set is
//! exactly `b = 0, ℓ ∈ {2, 4, 6}`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtilt_core::charring::{greedy_tilt_decompose, weyl_character};
use qtilt_core::fusion::{
    clebsch_quantum, decompose_report, expected_simple_character, expected_tilting_character,
    multiply, DecomposeReport,
};
use qtilt_core::lattice::{
    is_prime, recompose, special_labels, Moduli, Params, TwistLabel, Weight,
};
use qtilt_core::presentation::jpoly::{cheb_p, cheb_q, verify_identities_grid};
use qtilt_core::presentation::relations::{phi_eval, PresentationPoly};
use qtilt_core::presentation::{
    nonzerodivisor_probe, radical_evidence, squarefree_check, surjectivity_probe, verify_kernel,
};
use qtilt_core::{ClassVector, Exec};

struct Outcome {
    pass: bool,
    expected_failure: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        expected_failure: false,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (
        e < limit,
        format!("{:.2}s / limit {}s", e.as_secs_f64(), limit.as_secs()),
    )
}

fn w(a: i64, b: i64) -> Weight {
    Weight::new(a, b)
}

fn params(l: i64, p: i64) -> Params {
    Params::new(l, p).unwrap()
}

fn coprime_grid(
    ls: impl Iterator<Item = i64> + Clone,
    ps: impl Iterator<Item = i64>,
) -> Vec<Params> {
    ps.filter(|&p| is_prime(p))
        .flat_map(|p| ls.clone().filter_map(move |l| Params::new(l, p).ok()))
        .collect()
}

fn c1() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut n = 0;
    for l in 2..=13 {
        for a in 0..l {
            for b in 0..l {
                n += 1;
                let got = clebsch_quantum(w(a, 0), w(b, 0), l).unwrap().survivors;
                let c = &weyl_character(w(a, 0)).unwrap() * &weyl_character(w(b, 0)).unwrap();
                if greedy_tilt_decompose(&c, Moduli::uniform(l)).unwrap() != got {
                    bad.push((l, a, b));
                }
            }
        }
    }
    let (fast, time) = within(t, Duration::from_secs(10));
    outcome(
        bad.is_empty() && fast,
        format!("{n} pairs, {} mismatches, {time}", bad.len()),
    )
}

fn c2() -> Outcome {
    let dims = |l: i64, a: i64| -> Vec<String> {
        let r = decompose_report(
            w(a, 0),
            w(a, 0),
            params(l, if l == 5 { 3 } else { 2 }),
            true,
        )
        .unwrap();
        r.summands
            .iter()
            .map(|s| format!("T({}):{}", recompose(&s.label, r.params), s.dimension))
            .collect()
    };
    let (got5, got3) = (dims(5, 4), dims(3, 2));
    let pass = got5 == ["T(6,2):5", "T(7,1):10", "T(8,0):10"] && got3 == ["T(3,1):3", "T(4,0):6"];
    outcome(
        pass,
        format!("l=5: {}; l=3: {}", got5.join(" + "), got3.join(" + ")),
    )
}

fn corpus() -> Vec<DecomposeReport> {
    let grid = [(2, 3), (3, 2), (3, 5), (5, 2), (5, 3), (4, 3)];
    let mut jobs = Vec::new();
    for (k, &(l, p)) in grid.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        let cap = l * p * p;
        for _ in 0..200 {
            let (d1, d2) = (rng.gen_range(0..=cap), rng.gen_range(0..=cap));
            let (b1, b2) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
            jobs.push((params(l, p), w(d1 + b1, b1), w(d2 + b2, b2)));
        }
    }
    Exec::Parallel.map(&jobs, |&(p, x, y)| decompose_report(x, y, p, true).unwrap())
}

fn c3(corpus: &[DecomposeReport], t: Instant) -> Outcome {
    let broken = corpus.iter().filter(|r| r.conserved != Some(true)).count();
    let nonspecial = corpus
        .iter()
        .flat_map(|r| &r.summands)
        .filter(|s| !s.special)
        .count();
    let (fast, time) = within(t, Duration::from_secs(60));
    outcome(
        broken == 0 && nonspecial == 0 && fast,
        format!(
            "{} products, {broken} not conserved, {nonspecial} non-special summands, {time}",
            corpus.len()
        ),
    )
}

fn c4(corpus: &[DecomposeReport]) -> Outcome {
    let (mut tilting, mut simple, mut bad) = (0, 0, 0);
    for r in corpus {
        for s in &r.summands {
            if s.tilting {
                tilting += 1;
                bad += (expected_tilting_character(&s.label, r.params).unwrap() != s.character)
                    as usize;
            }
            if s.simple {
                simple += 1;
                bad += (expected_simple_character(&s.label, r.params).unwrap() != s.character)
                    as usize;
            }
        }
    }
    outcome(
        bad == 0,
        format!("{tilting} tilting-flagged, {simple} simple-flagged, {bad} exceptions"),
    )
}

fn c5() -> Outcome {
    let t = Instant::now();
    let ls: Vec<u32> = (2..=13).collect();
    let reports = verify_identities_grid(&ls, &ls, Exec::Parallel);
    let failed = reports.iter().filter(|r| !r.pass).count();
    let (fast, time) = within(t, Duration::from_secs(5));
    outcome(
        failed == 0 && fast,
        format!(
            "{} cells x 4 identities, {failed} failing cells, {time}",
            reports.len()
        ),
    )
}

fn c6() -> Outcome {
    let grid = coprime_grid(2..=7, 2..=7);
    let jobs: Vec<(Params, i64)> = grid
        .iter()
        .flat_map(|&p| (-1..=2).map(move |n| (p, n)))
        .collect();
    let reports = Exec::Parallel.map(&jobs, |&(p, n)| verify_kernel(p, n).unwrap());
    let failed: Vec<_> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| (r.params, r.n))
        .collect();
    let det_ok = reports.iter().filter(|r| r.n >= 0).all(|r| {
        r.generators
            .last()
            .is_some_and(|g| g.name == "Dq^l - D" && g.vanishes)
    });
    let literal_fails = reports.iter().all(|r| !r.literal_variant.vanishes);
    let p23 = params(2, 3);
    let cube = phi_eval(&PresentationPoly::var(-1).pow(3), p23).unwrap();
    let lbl = |s: &str| s.parse::<TwistLabel>().unwrap();
    let chain: ClassVector = [
        (lbl("1,0;1,0"), BigInt::from(1)),
        (lbl("2,1"), BigInt::from(2)),
    ]
    .into_iter()
    .collect();
    let chain_ok = cube == chain;
    outcome(
        failed.is_empty() && det_ok && literal_fails && chain_ok,
        format!(
            "{} (l,p,n) cases, {} failing; Dq^l - D vanishes: {det_ok}; Dq^l - D^l nonzero everywhere: {literal_fails}; [E]^3 chain: {chain_ok}",
            reports.len(),
            failed.len()
        ),
    )
}

fn c7() -> Outcome {
    let grid = coprime_grid(2..=5, 2..=5);
    let jobs: Vec<(Params, i64)> = grid
        .iter()
        .flat_map(|&p| (-1..=1).map(move |n| (p, n)))
        .collect();
    let reports = Exec::Parallel.map(&jobs, |&(p, n)| {
        surjectivity_probe(p, n, 2 * p.ell() + p.ell() * p.p()).unwrap()
    });
    let targets: usize = reports.iter().map(|r| r.targets).sum();
    let unreached: usize = reports.iter().map(|r| r.unreached.len()).sum();
    let non_integral: usize = reports.iter().map(|r| r.non_integral.len()).sum();
    outcome(
        unreached == 0,
        format!("{} cases, {targets} targets, {unreached} unreached, {non_integral} with non-integral witness", reports.len()),
    )
}

fn c8() -> Outcome {
    let mut notes = Vec::new();
    let sf_p = (2..=13u32).all(|l| squarefree_check(&cheb_p(l - 1)));
    let sf_q = (2..=13u32).all(|p| squarefree_check(&cheb_q(p - 1)));
    notes.push(format!(
        "P_(l-1) squarefree: {sf_p}; Q_(p-1) squarefree: {sf_q}"
    ));
    let grid = coprime_grid(2..=13, 2..=13);
    let radical = Exec::Parallel.map(&grid, |&p| radical_evidence(p, 0, 0).unwrap());
    let rad_ok = radical.iter().all(|r| r.radical && !r.negative_control);
    notes.push(format!("radical n=0 on {} cells: {rad_ok}", radical.len()));
    let jobs: Vec<(i64, i64)> = (2..=7)
        .flat_map(|l| (-10..=10).map(move |b| (b, l)))
        .collect();
    let probes = Exec::Parallel.map(&jobs, |&(b, l)| nonzerodivisor_probe(b, l, 0).unwrap());
    let zd: Vec<(i64, i64)> = probes
        .iter()
        .filter(|r| !r.nonzerodivisor)
        .map(|r| (r.b, r.l))
        .collect();
    notes.push(format!("nonzerodivisor false for (b,l) = {zd:?}"));
    let mut o = outcome(sf_p && sf_q && rad_ok && zd.is_empty(), notes.join("; "));
    o.expected_failure = sf_p && sf_q && rad_ok && zd == [(0, 2), (0, 4), (0, 6)];
    o
}

fn c9() -> Outcome {
    let mut bad = Vec::new();
    for (k, (l, p)) in [(3, 2), (2, 3)].into_iter().enumerate() {
        let pr = params(l, p);
        let pool = special_labels(pr, 10, None);
        let mut rng = ChaCha8Rng::seed_from_u64(90 + k as u64);
        let pick = |rng: &mut ChaCha8Rng| {
            let x = ClassVector::basis(pool[rng.gen_range(0..pool.len())].clone());
            x.twist(rng.gen_range(-2..=2), pr)
        };
        for i in 0..100 {
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let xy = multiply(&x, &y, pr).unwrap();
            let comm = xy == multiply(&y, &x, pr).unwrap();
            let assoc = multiply(&xy, &z, pr).unwrap()
                == multiply(&x, &multiply(&y, &z, pr).unwrap(), pr).unwrap();
            let unit = multiply(&x, &ClassVector::unit(), pr).unwrap() == x
                && multiply(&ClassVector::unit(), &x, pr).unwrap() == x;
            if !(comm && assoc && unit) {
                bad.push((l, p, i));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("200 triples, {} violations", bad.len()),
    )
}

fn c10() -> Outcome {
    let bad: Vec<u32> = (0..=40u32)
        .filter(|&r| cheb_p(r).bridge() != weyl_character(w(r as i64, 0)).unwrap())
        .collect();
    outcome(bad.is_empty(), format!("r = 0..40, mismatches at {bad:?}"))
}

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    let mut report = |k: u32, o: Outcome| {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if o.expected_failure {
            "; failing set matches the zero-divisor analysis"
        } else {
            ""
        };
        println!("criterion {k}: {verdict} ({}{note})", o.detail);
        if !o.pass && !o.expected_failure {
            unexpected.push(k);
        }
    };
    report(1, c1());
    report(2, c2());
    let t = Instant::now();
    let corpus = corpus();
    report(3, c3(&corpus, t));
    report(4, c4(&corpus));
    report(5, c5());
    report(6, c6());
    report(7, c7());
    report(8, c8());
    report(9, c9());
    report(10, c10());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcomes: {unexpected:?}");
        ExitCode::FAILURE
    }
}
