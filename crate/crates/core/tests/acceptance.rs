//! Acceptance run: one PASS/FAIL line per criterion, with pinned tolerances.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use symagm::freeprobe::{counterexample_sweep, difference_identity_residual, make_free_family};
use symagm::igm::{
    draw_indices, draw_noise, error_expansion_check, gen_group_orbit, gen_spherical_design,
    monte_carlo_mse, DesignKind, IgmConfig, OrbitVariant, Policy, VectorFamily,
};
use symagm::linalg::{complex_gaussian, spectral_norm, substream, Matrix, SPECTRAL_REL_TOL};
use symagm::partitions::{enumerate_partitions, falling_factorial, Partition};
use symagm::symsum::{
    bound_folded_sum, check_sandwich, check_theorem_bound, deviation_experiment, e_wo, e_wr,
    folded_sum, folding_identity_residual, loglog_slope, partition_sum, random_normalized_family,
    FamilySampler, OperatorFamily, SamplerKind, Side,
};

const ENUM_TOL: f64 = 1e-10;
const FOLD_TOL: f64 = 1e-10;
const LEMMA_SLACK: f64 = 1e-9;
const DIFF_TOL: f64 = 1e-9;
const NEGATIVE_FRACTION: f64 = 0.95;
const TRACE_GAP_TOL: f64 = 1e-3;
const EXPANSION_TOL: f64 = 1e-10;
const ENVELOPE_Z: f64 = 3.0;
const SCALAR_TOL: f64 = 1e-12;
const DESIGN_TOL: f64 = 1e-10;
const SLOPE_MAX: f64 = 1.3;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn gaussian_family(n: usize, m: usize, seed: u64, i: u64) -> OperatorFamily {
    let mut rng = substream(seed, i);
    let ops = (0..n)
        .map(|_| Matrix::from_fn(m, |_, _| complex_gaussian(&mut rng)))
        .collect();
    OperatorFamily::new(ops).unwrap()
}

fn enumeration_oracle() -> Check {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=5 {
        for m in 1..=3 {
            for d in 1..=3 {
                let fam = gaussian_family(n, m, 1, (100 * n + 10 * m + d) as u64);
                let mut total = Matrix::zeros(m);
                for sigma in enumerate_partitions(d).unwrap() {
                    total += &partition_sum(&fam, &sigma).unwrap();
                }
                let wr = e_wr(&fam, d).unwrap().scale_real((n as f64).powi(d as i32));
                worst = worst.max(wr.max_abs_diff(&total) / wr.max_abs().max(1.0));
                if d <= n {
                    let wo = e_wo(&fam, d)
                        .unwrap()
                        .scale_real(falling_factorial(n, d) as f64);
                    let finest = partition_sum(&fam, &Partition::finest(d)).unwrap();
                    worst = worst.max(wo.max_abs_diff(&finest) / finest.max_abs().max(1.0));
                }
                cases += 1;
            }
        }
    }
    let msg = format!("{cases} cases, max relative residual {worst:.2e} (tol {ENUM_TOL:e})");
    if worst <= ENUM_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sweep_families() -> Vec<(OperatorFamily, usize)> {
    (0..1000u64)
        .map(|i| {
            let mut rng = substream(2, i);
            let n = rng.random_range(2..=8);
            let m = rng.random_range(1..=4);
            let d = rng.random_range(1..=4usize.min(n));
            let side = if i % 2 == 0 { Side::Left } else { Side::Right };
            (random_normalized_family(n, m, side, &mut rng).unwrap(), d)
        })
        .collect()
}

fn theorem_suite(fams: &[(OperatorFamily, usize)]) -> Check {
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for (fam, d) in fams {
        let r = check_theorem_bound(fam, *d).unwrap();
        violations += usize::from(!r.passed);
        worst = worst.max(r.lhs - r.rhs);
    }
    let msg = format!(
        "{} families, {violations} violations, max lhs − rhs {worst:.3e}",
        fams.len()
    );
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sandwich_suite(fams: &[(OperatorFamily, usize)]) -> Check {
    let mut violations = 0;
    let mut margin = f64::INFINITY;
    for (fam, d) in fams {
        let r = check_sandwich(fam, *d).unwrap();
        violations += usize::from(!r.passed);
        margin = margin
            .min(r.lower_margin.unwrap())
            .min(r.upper_margin.unwrap());
    }
    let msg = format!(
        "{} families, {violations} violations, min eigenvalue margin {margin:.3e}",
        fams.len()
    );
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn folding_suite() -> Check {
    let mut residual = 0.0f64;
    let mut violations = 0;
    let mut checked = 0;
    for i in 0..100u64 {
        let mut rng = substream(4, i);
        let n = rng.random_range(2..=5);
        let m = rng.random_range(1..=3);
        let d = rng.random_range(2..=5);
        let fam = random_normalized_family(n, m, Side::Left, &mut rng).unwrap();
        let word: Vec<Matrix> = (0..d)
            .map(|_| fam.ops()[rng.random_range(0..n)].clone())
            .collect();
        residual = residual.max(folding_identity_residual(&word));
        for sigma in enumerate_partitions(d).unwrap() {
            if sigma.is_singleton(0) || sigma.nu() > n {
                continue;
            }
            let norm = spectral_norm(&folded_sum(&fam, &sigma).unwrap(), SPECTRAL_REL_TOL)
                .unwrap()
                .value;
            let bound = bound_folded_sum(&fam, &sigma).unwrap();
            violations += usize::from(norm > bound * (1.0 + LEMMA_SLACK));
            checked += 1;
        }
    }
    let msg = format!(
        "100 families, folding residual {residual:.2e} (tol {FOLD_TOL:e}), {checked} folded sums, {violations} over bound"
    );
    if residual <= FOLD_TOL && violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn difference_identity() -> Check {
    let combos = [(8, 3), (8, 4), (16, 3), (16, 4), (64, 3), (64, 4)];
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let (dim, n) = combos[i as usize % combos.len()];
        let fam = make_free_family(dim, n, 1.2, &mut substream(5, i)).unwrap();
        worst = worst.max(difference_identity_residual(&fam).unwrap());
    }
    let msg = format!("100 draws, max residual {worst:.2e} (tol {DIFF_TOL:e})");
    if worst <= DIFF_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn order_violation() -> Check {
    let rows = counterexample_sweep(256, 3, 1.2, 50, 6).unwrap();
    let negative = rows.iter().filter(|r| r.lambda_min < 0.0).count();
    let gap = rows.iter().map(|r| r.trace_gap).fold(0.0, f64::max);
    let lmin = rows
        .iter()
        .map(|r| r.lambda_min)
        .fold(f64::INFINITY, f64::min);
    let frac = negative as f64 / rows.len() as f64;
    let msg = format!(
        "dim 256: λ_min < 0 in {negative}/50 seeds (most negative {lmin:.3}), max trace gap {gap:.2e}"
    );
    if frac >= NEGATIVE_FRACTION && gap <= TRACE_GAP_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_vectors(n: usize, m: usize, real: bool, rng: &mut impl Rng) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let z = complex_gaussian(rng);
                    if real {
                        Complex64::new(z.re, 0.0)
                    } else {
                        z
                    }
                })
                .collect()
        })
        .collect()
}

fn expansion_identity() -> Check {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let mut rng = substream(7, i);
        let n = rng.random_range(2..=10);
        let m = rng.random_range(1..=4);
        let k = rng.random_range(1..=8);
        let real = rng.random_bool(0.5);
        let vecs = VectorFamily::new(random_vectors(n, m, real, &mut rng)).unwrap();
        let policy = if k <= n {
            Policy::WithoutReplacement
        } else {
            Policy::WithReplacement
        };
        let mut xs = random_vectors(2, m, real, &mut rng);
        let cfg = IgmConfig {
            gamma: rng.random_range(0.0..1.0),
            rho: rng.random_range(0.0..1.0),
            k,
            policy,
            trials: 1,
            seed: i,
            x_0: xs.pop().unwrap(),
            x_star: xs.pop().unwrap(),
        };
        let noise = draw_noise(&vecs, cfg.rho, &mut rng);
        let idx = draw_indices(policy, n, k, &mut rng).unwrap();
        worst = worst.max(error_expansion_check(&vecs, &cfg, &idx, &noise).unwrap());
    }
    let msg = format!("100 configs, max residual {worst:.2e} (tol {EXPANSION_TOL:e})");
    if worst <= EXPANSION_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn envelope() -> Check {
    let mut cases: Vec<(String, VectorFamily, f64, usize)> = Vec::new();
    for (d, k) in [(2, 2), (4, 8), (8, 32)] {
        let vecs =
            gen_group_orbit(d, OrbitVariant::RankOneFrame, &mut substream(8, d as u64)).unwrap();
        cases.push((format!("orbit:{d}"), vecs, 1.0 / d as f64, k));
    }
    cases.push((
        "cross:3".into(),
        gen_spherical_design(DesignKind::CrossPolytope(3)).unwrap(),
        1.0,
        3,
    ));
    cases.push((
        "simplex:2".into(),
        gen_spherical_design(DesignKind::Simplex(2)).unwrap(),
        1.0,
        1,
    ));
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, vecs, gamma, k) in cases {
        let m = vecs.m();
        let mut x_star = vec![Complex64::new(0.0, 0.0); m];
        x_star[0] = Complex64::new(1.0, 0.0);
        let cfg = IgmConfig {
            gamma,
            rho: 0.5,
            k,
            policy: Policy::WithoutReplacement,
            trials: 10_000,
            seed: 8,
            x_star,
            x_0: vec![Complex64::new(0.0, 0.0); m],
        };
        let stats = monte_carlo_mse(&vecs, &cfg).unwrap();
        let bounded = stats.bound.iter().filter(|b| b.is_some()).count();
        let holds = stats.envelope_holds(ENVELOPE_Z) && bounded == k + 1;
        let slack = (0..=k)
            .filter_map(|j| stats.bound[j].map(|b| b - stats.mean_mse[j]))
            .fold(f64::INFINITY, f64::min);
        ok &= holds;
        parts.push(format!(
            "{name} k≤{k} {} (min slack {slack:.3})",
            if holds { "ok" } else { "violated" }
        ));
    }
    let msg = format!("10⁴ trials, ρ = 0.5: {}", parts.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scalar_closed_form() -> Check {
    let mut worst = 0.0f64;
    for (x, gamma, x0, xs) in [
        (1.5, 0.2, 2.0, 0.0),
        (2.0, 0.1, 3.0, 1.0),
        (0.7, 1.5, -1.0, 0.5),
        (1.0, 0.3, 1.0, -2.0),
    ] {
        let mu: f64 = x * x;
        for (n, policy) in [
            (1, Policy::WithReplacement),
            (4, Policy::WithoutReplacement),
        ] {
            let vecs = VectorFamily::from_real(&vec![vec![x]; n]).unwrap();
            let cfg = IgmConfig {
                gamma,
                rho: 0.0,
                k: if n == 1 { 12 } else { 4 },
                policy,
                trials: 5,
                seed: 9,
                x_star: vec![Complex64::new(xs, 0.0)],
                x_0: vec![Complex64::new(x0, 0.0)],
            };
            let eta = (x0 - xs) * (x0 - xs);
            let stats = monte_carlo_mse(&vecs, &cfg).unwrap();
            for (k, got) in stats.mean_mse.iter().enumerate() {
                let want = (1.0 - gamma * mu).powi(2 * k as i32) * eta;
                worst = worst.max((got - want).abs() / want.max(1.0));
            }
        }
    }
    let msg = format!("8 scalar runs, max relative gap {worst:.2e} (tol {SCALAR_TOL:e})");
    if worst <= SCALAR_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn design_certificates() -> Check {
    let mut fams = Vec::new();
    let mut rng = substream(10, 0);
    for d in 2..=8 {
        fams.push(gen_group_orbit(d, OrbitVariant::RankOneFrame, &mut rng).unwrap());
        fams.push(gen_group_orbit(d, OrbitVariant::Projector, &mut rng).unwrap());
    }
    for m in 2..=6 {
        fams.push(gen_spherical_design(DesignKind::Simplex(m)).unwrap());
        fams.push(gen_spherical_design(DesignKind::CrossPolytope(m)).unwrap());
    }
    fams.push(gen_spherical_design(DesignKind::Icosahedron).unwrap());
    let worst = fams
        .iter()
        .map(|f| f.isotropy_residual())
        .fold(0.0, f64::max);
    let msg = format!(
        "{} generators, max second-moment residual {worst:.2e} (tol {DESIGN_TOL:e})",
        fams.len()
    );
    if worst <= DESIGN_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn deviation_scaling() -> Check {
    let sampler = FamilySampler {
        m: 3,
        kind: SamplerKind::PerturbedIsometry { delta: 0.3 },
    };
    let mut ds = Vec::new();
    let mut deltas = Vec::new();
    for d in 2..=5 {
        let r =
            deviation_experiment(&sampler, 32, d, 2, 500, &mut substream(11, d as u64)).unwrap();
        ds.push(d as f64);
        deltas.push(r.delta_wo.value);
    }
    let slope = loglog_slope(&ds, &deltas);
    let shown: Vec<String> = deltas.iter().map(|v| format!("{v:.4}")).collect();
    let msg = format!(
        "Δ_wo = [{}], fitted exponent {slope:.3} (max {SLOPE_MAX})",
        shown.join(", ")
    );
    if slope <= SLOPE_MAX {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("symagm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("igm.json");
    std::fs::write(
        &cfg,
        r#"{"gamma": 0.25, "rho": 0.5, "k": 8, "policy": "without_replacement", "trials": 500,
            "seed": 4, "x_star": [1, 0, 0, 0], "x_0": [0, 0, 0, 0], "generator": "orbit:4"}"#,
    )
    .map_err(|e| e.to_string())?;
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "verify-bounds",
            "--n",
            "3,6",
            "--m",
            "2,3",
            "--d",
            "1,2,3",
            "--families",
            "5",
        ],
        vec![
            "sandwich",
            "--n",
            "4,8",
            "--m",
            "2",
            "--d",
            "2,4",
            "--families",
            "5",
            "--preset",
            "unitary",
        ],
        vec!["deviation", "--d", "2,3", "--trials", "60"],
        vec!["counterexample", "--dim", "16", "--seeds", "6"],
        vec!["igm", "--config", cfg.to_str().unwrap(), "--compare"],
        vec!["designs"],
        vec!["sweep", "--generator", "orbit:3", "--points", "4"],
    ];
    let mut failures = Vec::new();
    for args in &runs {
        let outputs: Vec<Vec<u8>> = ["1", "3"]
            .iter()
            .map(|w| {
                let out = Command::new(env!("CARGO_BIN_EXE_symagm"))
                    .args(args)
                    .args(["--seed", "12", "--workers", w])
                    .output()
                    .expect("binary runs");
                let mut bytes = out.stdout;
                bytes.extend(out.status.code().unwrap_or(-1).to_string().bytes());
                bytes
            })
            .collect();
        if outputs[0] != outputs[1] || outputs[0].len() < 10 {
            failures.push(args[0]);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    let msg = format!(
        "{} subcommands at 1 and 3 workers, differing: {failures:?}",
        runs.len()
    );
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let sweep = sweep_families();
    let criteria: Vec<Criterion> = vec![
        ("enumeration oracle", Box::new(enumeration_oracle)),
        ("degree-d mean bound", Box::new(|| theorem_suite(&sweep))),
        ("sandwich order checks", Box::new(|| sandwich_suite(&sweep))),
        ("folding identity and folded bound", Box::new(folding_suite)),
        (
            "degree-3 difference identity",
            Box::new(difference_identity),
        ),
        ("order violation at equal traces", Box::new(order_violation)),
        ("IGM error expansion", Box::new(expansion_identity)),
        ("IGM bound envelope", Box::new(envelope)),
        ("scalar closed form", Box::new(scalar_closed_form)),
        (
            "generator isotropy certificates",
            Box::new(design_certificates),
        ),
        ("deviation scaling in d", Box::new(deviation_scaling)),
        ("determinism across workers", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
