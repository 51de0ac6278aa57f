use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{Cell, Table};
use super::{
    CliError, CounterexampleArgs, DesignsArgs, DeviationArgs, FamilyArgs, IgmArgs, Inputs, Preset,
    SamplerArg, SideArg, SweepArgs,
};
use crate::freeprobe::counterexample_sweep;
use crate::igm::{
    bound_rhs, gen_group_orbit, gen_spherical_design, monte_carlo_mse, DesignKind, GeneratorSpec,
    IgmConfig, IgmStats, OrbitVariant, Policy, VectorFamily,
};
use crate::linalg::{substream, ZERO};
use crate::symsum::{
    check_sandwich, check_theorem_bound, deviation_experiment, loglog_slope,
    random_normalized_family, unitary_family, FamilyJson, FamilySampler, OperatorFamily,
    SamplerKind, SymReport, MAX_ENUM_D, MAX_ENUM_N,
};

/// Largest accepted identity residual in `counterexample`.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Largest accepted second-moment residual in `designs`.
pub const DESIGN_TOL: f64 = 1e-10;
/// Standard errors of slack in the IGM envelope check.
pub const ENVELOPE_Z: f64 = 3.0;

/// Result of one subcommand before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub passed: bool,
    /// Lines for stderr.
    pub notes: Vec<String>,
    /// The seed the run actually used.
    pub seed: u64,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn side_label(s: SideArg) -> &'static str {
    match s {
        SideArg::Left => "left",
        SideArg::Right => "right",
    }
}

struct FamilyJob {
    index: usize,
    fam: OperatorFamily,
}

fn family_jobs(
    args: &FamilyArgs,
    seed: u64,
    inputs: &mut Inputs,
) -> Result<Vec<FamilyJob>, CliError> {
    if args.d.is_empty() || args.d.iter().any(|&d| d == 0 || d > MAX_ENUM_D) {
        return Err(usage(format!("every d must lie in 1..={MAX_ENUM_D}")));
    }
    if let Some(path) = &args.family {
        let json: FamilyJson = inputs.load(path)?;
        let fam = OperatorFamily::from_json(&json, args.side.into())?;
        if fam.n() > MAX_ENUM_N {
            return Err(usage(format!("family has n = {} > {MAX_ENUM_N}", fam.n())));
        }
        return Ok(vec![FamilyJob { index: 0, fam }]);
    }
    if args.families == 0 {
        return Err(usage("--families must be at least 1"));
    }
    if args.n.is_empty() || args.n.iter().any(|&n| n == 0 || n > MAX_ENUM_N) {
        return Err(usage(format!("every n must lie in 1..={MAX_ENUM_N}")));
    }
    if args.m.is_empty() || args.m.contains(&0) {
        return Err(usage("every m must be positive"));
    }
    let mut jobs = Vec::new();
    for f in 0..args.families {
        for &n in &args.n {
            for &m in &args.m {
                let mut rng = substream(seed, jobs.len() as u64);
                let fam = match args.preset {
                    Preset::Random => random_normalized_family(n, m, args.side.into(), &mut rng)?,
                    Preset::Unitary => unitary_family(n, m, args.side.into(), &mut rng),
                };
                jobs.push(FamilyJob { index: f, fam });
            }
        }
    }
    Ok(jobs)
}

type CheckedJobs = Vec<(FamilyJob, Vec<SymReport>)>;

fn run_checks(
    args: &FamilyArgs,
    seed: u64,
    inputs: &mut Inputs,
    check: fn(&OperatorFamily, usize) -> Result<SymReport, crate::symsum::SymError>,
) -> Result<(CheckedJobs, usize), CliError> {
    let jobs = family_jobs(args, seed, inputs)?;
    let skipped = jobs
        .iter()
        .map(|j| args.d.iter().filter(|&&d| d > j.fam.n()).count())
        .sum();
    let results: Vec<(FamilyJob, Vec<SymReport>)> = jobs
        .into_par_iter()
        .map(|job| {
            let reports = args
                .d
                .iter()
                .filter(|&&d| d <= job.fam.n())
                .map(|&d| check(&job.fam, d))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((job, reports))
        })
        .collect::<Result<_, crate::symsum::SymError>>()?;
    Ok((results, skipped))
}

fn skip_note(skipped: usize) -> Vec<String> {
    if skipped > 0 {
        vec![format!(
            "note: skipped {skipped} (family, d) pairs with d > n"
        )]
    } else {
        Vec::new()
    }
}

/// `‖I − E_wo,d‖` against `(1+C)/n · d(d−1)/2` for every family and degree.
pub fn cmd_verify_bounds(
    args: &FamilyArgs,
    seed: u64,
    inputs: &mut Inputs,
) -> Result<Outcome, CliError> {
    let (results, skipped) = run_checks(args, seed, inputs, check_theorem_bound)?;
    let mut table = Table::new(&["family", "n", "m", "d", "side", "c", "lhs", "rhs", "passed"]);
    let mut passed = true;
    for (job, reports) in &results {
        for r in reports {
            passed &= r.passed;
            table.push(vec![
                job.index.into(),
                job.fam.n().into(),
                job.fam.m().into(),
                r.d.into(),
                side_label(args.side).into(),
                job.fam.c().into(),
                r.lhs.into(),
                r.rhs.into(),
                r.passed.into(),
            ]);
        }
    }
    Ok(Outcome {
        table,
        passed,
        notes: skip_note(skipped),
        seed,
    })
}

/// `(1−ε)I ≤ E_wo,d ≤ (1+ε)I` for every family and degree.
pub fn cmd_sandwich(
    args: &FamilyArgs,
    seed: u64,
    inputs: &mut Inputs,
) -> Result<Outcome, CliError> {
    let (results, skipped) = run_checks(args, seed, inputs, check_sandwich)?;
    let mut table = Table::new(&[
        "family",
        "n",
        "m",
        "d",
        "side",
        "c",
        "epsilon",
        "lhs",
        "lower_margin",
        "upper_margin",
        "passed",
    ]);
    let mut passed = true;
    for (job, reports) in &results {
        for r in reports {
            passed &= r.passed;
            table.push(vec![
                job.index.into(),
                job.fam.n().into(),
                job.fam.m().into(),
                r.d.into(),
                side_label(args.side).into(),
                job.fam.c().into(),
                r.epsilon.into(),
                r.lhs.into(),
                r.lower_margin.into(),
                r.upper_margin.into(),
                r.passed.into(),
            ]);
        }
    }
    Ok(Outcome {
        table,
        passed,
        notes: skip_note(skipped),
        seed,
    })
}

/// One deviation experiment per degree; degree `i` of the list draws from
/// substream `i` of `seed`.
pub fn cmd_deviation(args: &DeviationArgs, seed: u64) -> Result<Outcome, CliError> {
    if args.m == 0 {
        return Err(usage("--m must be positive"));
    }
    let kind = match args.sampler {
        SamplerArg::Identity => SamplerKind::Identity,
        SamplerArg::HaarUnitary => SamplerKind::HaarUnitary,
        SamplerArg::PerturbedIsometry => {
            if !(args.delta.is_finite() && args.delta >= 0.0) {
                return Err(usage("--delta must be finite and nonnegative"));
            }
            SamplerKind::PerturbedIsometry { delta: args.delta }
        }
    };
    let sampler = FamilySampler { m: args.m, kind };
    let mut table = Table::new(&[
        "d",
        "epsilon_hat",
        "epsilon_hat_stderr",
        "delta_wo",
        "delta_wo_stderr",
        "delta_wo_sample_centered",
        "ratio",
        "ratio_stderr",
        "predicted_delta_scale",
    ]);
    let mut ds = Vec::new();
    let mut deltas = Vec::new();
    for (i, &d) in args.d.iter().enumerate() {
        let r = deviation_experiment(
            &sampler,
            args.n,
            d,
            args.p,
            args.trials,
            &mut substream(seed, i as u64),
        )?;
        ds.push(d as f64);
        deltas.push(r.delta_wo.value);
        table.push(vec![
            d.into(),
            r.epsilon_hat.value.into(),
            r.epsilon_hat.stderr.into(),
            r.delta_wo.value.into(),
            r.delta_wo.stderr.into(),
            r.delta_wo_sample_centered.into(),
            r.ratio.value.into(),
            r.ratio.stderr.into(),
            r.predicted_delta_scale.into(),
        ]);
    }
    let mut notes = Vec::new();
    if ds.len() >= 2 && deltas.iter().all(|&x| x > 0.0) {
        notes.push(format!(
            "fitted exponent of delta_wo against d: {:.4}",
            loglog_slope(&ds, &deltas)
        ));
    }
    Ok(Outcome {
        table,
        passed: true,
        notes,
        seed,
    })
}

/// One row per seed; fails when a difference-identity residual exceeds
/// [`IDENTITY_TOL`].
pub fn cmd_counterexample(args: &CounterexampleArgs, seed: u64) -> Result<Outcome, CliError> {
    if args.seeds == 0 {
        return Err(usage("--seeds must be at least 1"));
    }
    let rows = counterexample_sweep(args.dim, args.n, args.t, args.seeds, seed)?;
    let mut table = Table::new(&[
        "seed",
        "identity_residual",
        "lambda_min",
        "trace_gap",
        "tau_wo",
        "freeness_residual",
    ]);
    for r in &rows {
        table.push(vec![
            r.seed.into(),
            r.identity_residual.into(),
            r.lambda_min.into(),
            r.trace_gap.into(),
            r.tau_wo.into(),
            r.freeness_residual.into(),
        ]);
    }
    let negative = rows.iter().filter(|r| r.lambda_min < 0.0).count();
    let worst_gap = rows.iter().map(|r| r.trace_gap).fold(0.0, f64::max);
    let notes = vec![format!(
        "negative lambda_min in {negative} of {} seeds; largest trace gap {worst_gap:.3e}",
        rows.len()
    )];
    Ok(Outcome {
        passed: rows.iter().all(|r| r.identity_residual <= IDENTITY_TOL),
        table,
        notes,
        seed,
    })
}

/// Contents of an `igm --config` file: the run parameters plus the data
/// source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IgmJob {
    #[serde(flatten)]
    pub config: IgmConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorField>,
}

/// A generator in a config file: the structured form or a short name such as
/// `"orbit:4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorField {
    Short(String),
    Spec(GeneratorSpec),
}

fn push_curve(table: &mut Table, stats: &IgmStats) {
    for (j, &k) in stats.steps.iter().enumerate() {
        table.push(vec![
            k.into(),
            stats.policy.label().into(),
            stats.mean_mse[j].into(),
            stats.stderr[j].into(),
            stats.bound[j].into(),
        ]);
    }
}

fn bound_notes(stats: &IgmStats) -> Vec<String> {
    // Consecutive steps failing the same condition share one warning; the
    // condition is the message up to its first number.
    let kind = |msg: &str| {
        msg.split(|c: char| c.is_ascii_digit())
            .next()
            .unwrap_or("")
            .to_string()
    };
    let mut groups: Vec<(usize, usize, String)> = Vec::new();
    for (j, err) in stats.bound_error.iter().enumerate() {
        let Some(msg) = err else { continue };
        let k = stats.steps[j];
        match groups.last_mut() {
            Some((_, end, first)) if *end + 1 == k && kind(first) == kind(msg) => *end = k,
            _ => groups.push((k, k, msg.clone())),
        }
    }
    groups
        .into_iter()
        .map(|(a, b, msg)| {
            format!(
                "warning: {} bound not applicable for k = {a}..={b}: {msg}",
                stats.policy.label()
            )
        })
        .collect()
}

/// Monte Carlo error curve for the configured policy, checked against the
/// bound plus [`ENVELOPE_Z`] standard errors wherever the bound applies.
/// With-replacement curves are reported and never checked.
pub fn cmd_igm(
    args: &IgmArgs,
    seed: Option<u64>,
    inputs: &mut Inputs,
) -> Result<Outcome, CliError> {
    let job: IgmJob = inputs.load(&args.config)?;
    let mut cfg = job.config;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let spec = match (&args.generator, job.generator) {
        (Some(text), _) => text.parse::<GeneratorSpec>()?,
        (None, Some(GeneratorField::Short(text))) => text.parse::<GeneratorSpec>()?,
        (None, Some(GeneratorField::Spec(g))) => g,
        (None, None) => {
            return Err(usage(
                "no generator: set \"generator\" in the config or pass --generator",
            ))
        }
    };
    let vecs = spec.build(cfg.seed)?;
    let stats = monte_carlo_mse(&vecs, &cfg)?;
    let mut table = Table::new(&["k", "policy", "mean_mse", "stderr", "bound"]);
    push_curve(&mut table, &stats);
    let mut notes = bound_notes(&stats);
    if stats.k_exceeds_cube_root {
        notes.push(format!(
            "note: k = {} is at least the cube root of the pool size {}",
            cfg.k,
            cfg.policy.pool_size(vecs.n())
        ));
    }
    let checked = cfg.policy != Policy::WithReplacement;
    let mut passed = true;
    if checked {
        if let Some(j) = stats.first_violation(ENVELOPE_Z) {
            passed = false;
            notes.push(format!(
                "violation: mean {} exceeds bound {} + {ENVELOPE_Z} stderr at k = {}",
                stats.mean_mse[j],
                stats.bound[j].unwrap_or(f64::NAN),
                stats.steps[j]
            ));
        }
    }
    if args.compare && checked {
        let wr = IgmConfig {
            policy: Policy::WithReplacement,
            ..cfg.clone()
        };
        push_curve(&mut table, &monte_carlo_mse(&vecs, &wr)?);
    }
    Ok(Outcome {
        table,
        passed,
        notes,
        seed: cfg.seed,
    })
}

fn design_row(table: &mut Table, name: String, f: &VectorFamily) -> bool {
    table.push(vec![
        name.into(),
        f.n().into(),
        f.m().into(),
        f.sigma().into(),
        f.mu().into(),
        f.isotropy_residual().into(),
        f.trace_inequality_holds().into(),
        f.is_isotropic().into(),
    ]);
    f.isotropy_residual() <= DESIGN_TOL
}

/// Second-moment certificates of every requested generator; orbit `i` draws
/// its fiducial from substream `i` of `seed`.
pub fn cmd_designs(args: &DesignsArgs, seed: u64) -> Result<Outcome, CliError> {
    let mut table = Table::new(&[
        "generator",
        "n",
        "m",
        "sigma",
        "mu",
        "isotropy_residual",
        "trace_inequality",
        "isotropic",
    ]);
    let mut passed = true;
    for (i, &d) in args.orbit.iter().enumerate() {
        for (label, variant) in [
            ("orbit", OrbitVariant::RankOneFrame),
            ("projector", OrbitVariant::Projector),
        ] {
            let f = gen_group_orbit(d, variant, &mut substream(seed, i as u64))?;
            passed &= design_row(&mut table, format!("{label}:{d}"), &f);
        }
    }
    let kinds = args
        .simplex
        .iter()
        .map(|&m| ("simplex", m, DesignKind::Simplex(m)))
        .chain(
            args.cross
                .iter()
                .map(|&m| ("cross", m, DesignKind::CrossPolytope(m))),
        );
    for (label, m, kind) in kinds {
        let f = gen_spherical_design(kind)?;
        passed &= design_row(&mut table, format!("{label}:{m}"), &f);
    }
    let f = gen_spherical_design(DesignKind::Icosahedron)?;
    passed &= design_row(&mut table, "icosahedron".into(), &f);
    Ok(Outcome {
        table,
        passed,
        notes: Vec::new(),
        seed,
    })
}

/// The bound and its two terms over a `(γ, k)` grid, with the reason when a
/// precondition fails.
pub fn cmd_sweep(args: &SweepArgs, seed: u64) -> Result<Outcome, CliError> {
    let spec: GeneratorSpec = args.generator.parse()?;
    let vecs = spec.build(seed)?;
    if args.mult == 0 {
        return Err(usage("--mult must be at least 1"));
    }
    if !(args.eta.is_finite() && args.eta >= 0.0) {
        return Err(usage("--eta must be finite and nonnegative"));
    }
    let policy = if args.mult == 1 {
        Policy::WithoutReplacement
    } else {
        Policy::BlockRepeat(args.mult)
    };
    let pool = policy.pool_size(vecs.n());
    let k_max = args.k_max.unwrap_or((pool / 2).max(1));
    let gammas: Vec<f64> = if args.gammas.is_empty() {
        let top = 2.0 / vecs.mu();
        (1..=args.points)
            .map(|i| top * i as f64 / (args.points + 1) as f64)
            .collect()
    } else {
        args.gammas.clone()
    };
    let mut x_0 = vec![ZERO; vecs.m()];
    x_0[0].re = args.eta.sqrt();
    let mut table = Table::new(&[
        "gamma",
        "k",
        "phi",
        "bound",
        "initial_term",
        "noise_term",
        "status",
    ]);
    let mut notes = Vec::new();
    for &gamma in &gammas {
        let cfg = IgmConfig {
            gamma,
            rho: args.rho,
            k: k_max,
            policy,
            trials: 1,
            seed,
            x_star: vec![ZERO; vecs.m()],
            x_0: x_0.clone(),
        };
        cfg.validate(&vecs)?;
        let mut last = f64::INFINITY;
        let mut monotone = true;
        for k in 1..=k_max {
            match bound_rhs(&vecs, &cfg, k) {
                Ok(t) => {
                    monotone &= t.initial_term <= last;
                    last = t.initial_term;
                    table.push(vec![
                        gamma.into(),
                        k.into(),
                        t.phi.into(),
                        t.value.into(),
                        t.initial_term.into(),
                        t.noise_term.into(),
                        "ok".into(),
                    ]);
                }
                Err(e) => table.push(vec![
                    gamma.into(),
                    k.into(),
                    crate::igm::phi(gamma, vecs.sigma(), vecs.mu()).into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    e.to_string().into(),
                ]),
            }
        }
        if !monotone {
            notes.push(format!(
                "note: initial term increases in k somewhere at gamma = {gamma}"
            ));
        }
    }
    Ok(Outcome {
        table,
        passed: true,
        notes,
        seed,
    })
}
