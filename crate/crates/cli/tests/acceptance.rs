//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use mercerkit::bases::{enumerate_multiindices, weyl_dimension, GaussBasis, WeylBasis};
use mercerkit::kernel::{GramMatrix, KernelSpec, Point};
use mercerkit::linalg::{self, Matrix, Vector};
use mercerkit::mercer::{self, SpectralDecomposition};
use mercerkit::rkhs::{self, FiniteRkhs};
use mercerkit::DiscreteMeasure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

struct Case {
    name: String,
    spec: KernelSpec,
    measure: DiscreteMeasure,
}

fn p(c: &[f64]) -> Point {
    Point::new(c.to_vec()).unwrap()
}

fn interval_grid(m: usize) -> DiscreteMeasure {
    DiscreteMeasure::uniform_grid(&p(&[-1.0]), &p(&[1.0]), &[m], 1.0).unwrap()
}

fn gaussian_cases() -> Vec<Case> {
    [0.5, 1.0, 2.0]
        .into_iter()
        .map(|sigma| Case {
            name: format!("gauss σ={sigma}"),
            spec: KernelSpec::gaussian(sigma).unwrap(),
            measure: interval_grid(64),
        })
        .collect()
}

fn random_psd(rng: &mut ChaCha8Rng, m: usize, rank: usize) -> Matrix {
    let b = Matrix::from_fn(m, rank, |_, _| rng.gen_range(-1.0..1.0));
    let g = &b * b.transpose();
    (&g + g.transpose()) * 0.5
}

/// Gaussian, Weyl (d ≤ 4, n ≤ 3), identity and 20 random tabulated kernels.
fn suite() -> Vec<Case> {
    let mut cases = gaussian_cases();
    let square =
        DiscreteMeasure::uniform_grid(&p(&[-1.0, -1.0]), &p(&[1.0, 1.0]), &[8, 8], 1.0).unwrap();
    let cube = DiscreteMeasure::monte_carlo(&p(&[-1.0; 3]), &p(&[1.0; 3]), 100, 1.0, 11).unwrap();
    for d in 1..=4 {
        for (n, measure) in [
            (1, interval_grid(64)),
            (2, square.clone()),
            (3, cube.clone()),
        ] {
            cases.push(Case {
                name: format!("weyl n={n} d={d}"),
                spec: KernelSpec::weyl(d),
                measure,
            });
        }
    }
    cases.push(Case {
        name: "identity".into(),
        spec: KernelSpec::Identity,
        measure: interval_grid(64),
    });
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..20 {
        let m = rng.gen_range(8..=128);
        let rank = rng.gen_range(1..=m / 2);
        let points: Vec<Point> = (0..m).map(|i| p(&[i as f64])).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.gen_range(0.01..1.0)).collect();
        let g = random_psd(&mut rng, m, rank);
        cases.push(Case {
            name: format!("tab #{k} m={m} r={rank}"),
            spec: KernelSpec::tabulated(points.clone(), g).unwrap(),
            measure: DiscreteMeasure::new(points, weights).unwrap(),
        });
    }
    cases
}

fn decompose(case: &Case) -> SpectralDecomposition {
    mercer::spectrum(&mercer::assemble(&case.spec, &case.measure).unwrap()).unwrap()
}

/// Runs `f` on every case and reports the worst value against `bound`.
fn over_suite(cases: &[Case], bound: f64, f: impl Fn(&Case) -> f64) -> Outcome {
    let mut worst = (0.0_f64, String::new());
    let mut pass = true;
    for case in cases {
        let v = f(case);
        pass &= v <= bound;
        if v > worst.0 || v.is_nan() {
            worst = (v, case.name.clone());
        }
    }
    Outcome {
        pass,
        detail: format!(
            "{} kernels, worst {:.3e} ({}) vs bound {bound:e}",
            cases.len(),
            worst.0,
            worst.1
        ),
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for case in gaussian_cases() {
        let dec = decompose(&case);
        let report =
            mercer::mercer_partial_sum(&dec, &case.spec, dec.rank(), case.measure.points())
                .unwrap();
        worst = worst.max(report.sup_error);
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-8 && elapsed < Duration::from_secs(1),
        detail: format!("worst sup-error {worst:.3e} (≤ 1e-8), runtime {elapsed:.2?} (< 1 s)"),
    }
}

fn criterion_2(cases: &[Case]) -> Outcome {
    over_suite(cases, 1e-10, |c| {
        mercer::trace_check(&decompose(c), &c.spec, &c.measure).unwrap()
    })
}

fn criterion_3(cases: &[Case]) -> Outcome {
    over_suite(cases, 1e-10, |c| {
        mercer::hs_check(&decompose(c), &c.spec, &c.measure).unwrap()
    })
}

fn criterion_4(cases: &[Case]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for case in cases {
        let it = mercer::iterated_kernel(&case.spec, &case.measure).unwrap();
        worst = worst.max(it.square_gap);
        if !(it.square_gap <= 1e-10 && it.dominance_certified(1e-8)) {
            failures.push(format!(
                "{} (gap {:.3e}, c {:?}, s1 {:.6e})",
                case.name, it.square_gap, it.dominance.constant, it.operator_norm
            ));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "worst square gap {worst:.3e} (≤ 1e-10·‖A‖²), dominance certified on {}/{}{}",
            cases.len() - failures.len(),
            cases.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", failures.join(", "))
            }
        ),
    }
}

fn criterion_5(cases: &[Case]) -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    let mut worst_final = 0.0_f64;
    for case in cases {
        let dec = decompose(case);
        let d = mercer::dini_remainders(&dec, &case.spec, case.measure.points()).unwrap();
        for w in d.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
        worst_final = worst_final.max(d.last().unwrap().abs());
    }
    Outcome {
        pass: worst_rise <= 1e-12 && worst_final <= 1e-8,
        detail: format!(
            "{} kernels, largest step increase {worst_rise:.3e} (≤ 1e-12), largest final remainder {worst_final:.3e} (≤ 1e-8)",
            cases.len()
        ),
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let m = rng.gen_range(1..=16);
        let rank = rng.gen_range(1..=m);
        let g = random_psd(&mut rng, m, rank);
        let points: Vec<Point> = (0..m).map(|i| p(&[i as f64])).collect();
        let h = FiniteRkhs::from_gram(GramMatrix::from_parts(points.clone(), g.clone()).unwrap())
            .unwrap();
        let phi = rkhs::minimal_linearisation(&h);
        let back = rkhs::recover_from_onb(&points, phi.matrix()).unwrap();
        worst = worst.max((back.entries() - &g).amax());
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("100 random PSD matrices, worst entry error {worst:.3e} (≤ 1e-9)"),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

fn criterion_7() -> Outcome {
    let mut dims_ok = true;
    for n in 1..=4usize {
        for d in 0..=5u32 {
            let expected = binomial((n as u64) + d as u64 - 1, n as u64 - 1);
            dims_ok &= weyl_dimension(n, d) == expected
                && WeylBasis::new(n, d).unwrap().dimension() as u64 == expected
                && enumerate_multiindices(n, d).len() as u64 == expected;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for n in 1..=4usize {
        for d in 0..=5u32 {
            let basis = WeylBasis::new(n, d).unwrap();
            for _ in 0..100 {
                let x = p(&(0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                let y = p(&(0..n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
                let ex = basis.eval_all(&x).unwrap();
                let ey = basis.eval_all(&y).unwrap();
                let sum: f64 = ex.iter().zip(&ey).map(|(a, b)| a * b).sum();
                let direct = x
                    .coords()
                    .iter()
                    .zip(y.coords())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .powi(d as i32);
                worst = worst.max((sum - direct).abs());
            }
        }
    }
    Outcome {
        pass: dims_ok && worst <= 1e-10,
        detail: format!(
            "dimensions {} for n ≤ 4, d ≤ 5; worst reconstruction error {worst:.3e} (≤ 1e-10) over 100 pairs per (n, d)",
            if dims_ok { "match" } else { "MISMATCH" }
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut worst_gram = 0.0_f64;
    for n in 1..=2 {
        for sigma in [0.5, 1.0, 2.0] {
            let b = GaussBasis::new(n, sigma, 8).unwrap();
            let coeffs: Vec<Vec<f64>> = (0..b.len())
                .map(|i| b.basis_coefficients(i).unwrap())
                .collect();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    let ip = b.inner(&coeffs[i], &coeffs[j]).unwrap();
                    worst_gram = worst_gram.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    let mut within_tail_only = 0;
    let mut trials = 0;
    let mut worst_ratio = 0.0_f64;
    for n in 1..=2usize {
        let basis = GaussBasis::new(n, 1.0, 32).unwrap();
        let spec = KernelSpec::gaussian(1.0).unwrap();
        for _ in 0..100 {
            let draw = |rng: &mut ChaCha8Rng| {
                let radius = rng.gen_range(0.0..=2.0);
                let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                p(&dir.iter().map(|v| v * radius / norm).collect::<Vec<_>>())
            };
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let r = basis.partial_reconstruction(&x, &y).unwrap();
            let err = (r.value - spec.evaluate(&x, &y).unwrap()).abs();
            trials += 1;
            if err > r.error_bound() {
                violations += 1;
            }
            if err <= r.tail_bound {
                within_tail_only += 1;
            }
            if r.error_bound() > 0.0 {
                worst_ratio = worst_ratio.max(err / r.error_bound());
            }
        }
    }
    Outcome {
        pass: worst_gram <= 1e-12 && violations == 0,
        detail: format!(
            "basis Gram error {worst_gram:.3e} (≤ 1e-12); reconstruction within bound on {}/{trials} pairs \
             ({within_tail_only} within the tail term alone), worst error/bound {worst_ratio:.3}",
            trials - violations
        ),
    }
}

/// `α·SS* ≥ TT*` for `α = ‖S⁺T‖²` with the pseudo-inverse from an independent SVD.
fn dominated(t: &Matrix, s: &Matrix) -> bool {
    let svd = s.clone().svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max();
    let pinv = svd.pseudo_inverse(cutoff).unwrap();
    let f = pinv * t;
    let alpha = f.clone().svd(false, false).singular_values.max().powi(2) * (1.0 + 1e-8);
    let gap = s * s.transpose() * alpha - t * t.transpose();
    let gap = (&gap + gap.transpose()) * 0.5;
    let min = gap.clone().symmetric_eigen().eigenvalues.min();
    min >= -1e-9 * linalg::inf_norm(&gap).max(1.0)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagreements = 0;
    let mut worst_planted = 0.0_f64;
    let mut included_count = 0;
    for trial in 0..100 {
        let m = rng.gen_range(2..=12);
        let k = rng.gen_range(1..=m);
        let rank = rng.gen_range(1..=m.min(k));
        let a = Matrix::from_fn(m, rank, |_, _| rng.gen_range(-1.0..1.0));
        let b = Matrix::from_fn(k, rank, |_, _| rng.gen_range(-1.0..1.0));
        let s = &a * b.transpose();
        let cols = rng.gen_range(1..=m);
        let planted = trial % 2 == 0;
        let t = if planted {
            let f = Matrix::from_fn(k, cols, |_, _| rng.gen_range(-1.0..1.0));
            &s * f
        } else {
            Matrix::from_fn(m, cols, |_, _| rng.gen_range(-1.0..1.0))
        };

        let proj = linalg::svd(&s).unwrap().range_projector();
        let in_range = (&t - &proj * &t).norm() <= 1e-8 * t.norm().max(1.0);
        let bounded = dominated(&t, &s);
        let factor = linalg::douglas_factor(&t, &s);
        let factors = factor.is_ok();
        if !(in_range == bounded && bounded == factors) {
            disagreements += 1;
        }
        included_count += usize::from(in_range);
        if planted {
            match &factor {
                Ok(df) => worst_planted = worst_planted.max((&s * &df.factor - &t).norm()),
                Err(_) => worst_planted = f64::INFINITY,
            }
        }
    }
    Outcome {
        pass: disagreements == 0 && worst_planted <= 1e-9,
        detail: format!(
            "100 triples ({included_count} with range inclusion), {disagreements} disagreements; \
             worst planted ‖SF−T‖ {worst_planted:.3e} (≤ 1e-9)"
        ),
    }
}

fn criterion_10(cases: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut verdict_mismatch = 0;
    let mut worst_norm_gap = 0.0_f64;
    let mut members = 0;
    let mut probes = 0;
    for case in cases {
        let dec = decompose(case);
        let h = FiniteRkhs::build(&case.spec, case.measure.points()).unwrap();
        let m = case.measure.len();
        for i in 0..50 {
            let probe: Vec<f64> = if i % 2 == 0 {
                let c = Vector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
                (h.gram().entries() * c).iter().copied().collect()
            } else {
                (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()
            };
            let a = rkhs::membership(&h, &probe).unwrap();
            let b = mercer::spectral_membership(&dec, &probe).unwrap();
            probes += 1;
            if a.member != b.member {
                verdict_mismatch += 1;
                continue;
            }
            if let (Some(n1), Some(n2)) = (a.norm, b.rkhs_norm) {
                members += 1;
                worst_norm_gap = worst_norm_gap.max((n1 - n2).abs() / n1.max(1.0));
            }
        }
    }
    Outcome {
        pass: verdict_mismatch == 0 && worst_norm_gap <= 1e-6,
        detail: format!(
            "{probes} probes over {} kernels ({members} members), {verdict_mismatch} verdict mismatches, \
             worst relative norm gap {worst_norm_gap:.3e} (≤ 1e-6)",
            cases.len()
        ),
    }
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let spec = KernelSpec::gaussian(1.0).unwrap();
    let leading: Vec<Vec<f64>> = [32, 64, 128]
        .into_iter()
        .map(|m| {
            let op = mercer::assemble(&spec, &interval_grid(m)).unwrap();
            mercer::spectrum(&op).unwrap().eigenvalues()[..5].to_vec()
        })
        .collect();
    let elapsed = start.elapsed();
    let mut worst_ratio = 0.0_f64;
    for ((a, b), c) in leading[0].iter().zip(&leading[1]).zip(&leading[2]) {
        let first = (b - a).abs();
        let second = (c - b).abs();
        let ratio = if first > 0.0 {
            second / first
        } else if second == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        worst_ratio = worst_ratio.max(ratio);
    }
    Outcome {
        pass: worst_ratio <= 0.5 && elapsed < Duration::from_secs(5),
        detail: format!(
            "worst difference ratio {worst_ratio:.3} (≤ 0.5), runtime {elapsed:.2?} (< 5 s)"
        ),
    }
}

fn criterion_12() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let measure = dir.path().join("mu.csv");
    let mu = DiscreteMeasure::monte_carlo(&p(&[-1.0, -1.0]), &p(&[1.0, 1.0]), 40, 2.0, 12).unwrap();
    std::fs::write(&measure, mu.to_csv()).unwrap();
    let run = |out: &str| {
        let target = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_mercerkit"))
            .args([
                "mercer",
                "--kernel",
                "sum(gauss:sigma=0.8,weyl:d=2)",
                "--measure",
            ])
            .arg(&measure)
            .arg("--out")
            .arg(&target)
            .status()
            .unwrap();
        (status.code(), std::fs::read(&target).unwrap_or_default())
    };
    let (c1, a) = run("a.json");
    let (c2, b) = run("b.json");
    let stdout = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_mercerkit"))
            .args(["mercer", "--kernel", "gauss:sigma=1", "--grid", "-1:1:64"])
            .env("MERCERKIT_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let (s1, s2) = (stdout("1"), stdout("3"));
    let pass =
        c1 == Some(0) && c2 == Some(0) && !a.is_empty() && a == b && !s1.is_empty() && s1 == s2;
    Outcome {
        pass,
        detail: format!(
            "file reports {} ({} bytes), stdout reports across thread counts {}",
            if a == b { "identical" } else { "DIFFER" },
            a.len(),
            if s1 == s2 { "identical" } else { "DIFFER" }
        ),
    }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let cases = suite();
    let criteria: Vec<Criterion> = vec![
        ("discrete Mercer reconstruction", Box::new(criterion_1)),
        ("trace identity", Box::new(|| criterion_2(&cases))),
        ("Hilbert–Schmidt identity", Box::new(|| criterion_3(&cases))),
        (
            "iterated kernel and dominance",
            Box::new(|| criterion_4(&cases)),
        ),
        ("Dini monotonicity", Box::new(|| criterion_5(&cases))),
        ("ONB recovery round trip", Box::new(criterion_6)),
        ("Weyl closed forms", Box::new(criterion_7)),
        ("Gaussian basis", Box::new(criterion_8)),
        ("Douglas equivalence", Box::new(criterion_9)),
        ("membership agreement", Box::new(|| criterion_10(&cases))),
        ("eigenvalue stabilisation", Box::new(criterion_11)),
        ("CLI determinism", Box::new(criterion_12)),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let outcome = run();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {title}: {}",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
