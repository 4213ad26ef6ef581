use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twocenter::dynamics_oracle::{oracle_periods, OrbitControls};
use twocenter::elliptic_identities::{check_lemma, lemma_batch, real_ratio_samples, real_part_corollary_check};
use twocenter::monotonicity::{scan_fiber, ScanConfig};
use twocenter::param_domain::{
    classify_in, f_boundaries, f_sing, normalize, MassChoice, NormalizedParams, SystemParams, WDomain,
};
use twocenter::period_engine::{PeriodEngine, PeriodResult, PeriodStatus};

use crate::args::{Cli, Command, Format, OracleArgs, PeriodArgs, PointArgs, Repr, RotationArgs, ScanArgs, Suite, Which};
use crate::output::{fmt17, Field, Record};
use crate::CliError;

pub struct Ctx {
    pub engine: PeriodEngine<f64>,
    pub format: Option<Format>,
}

impl Ctx {
    pub fn new(cli: &Cli) -> Result<Self, CliError> {
        let mut spec = PeriodEngine::<f64>::default().spec;
        if let Some(t) = cli.rel_tol {
            spec = spec.with_rel_tol(t);
        }
        if let Some(l) = cli.max_levels {
            spec = spec.with_max_levels(l);
        }
        spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let engine = if cli.rel_tol.is_some() || cli.max_levels.is_some() {
            PeriodEngine::with_spec(spec)
        } else {
            PeriodEngine::default()
        };
        Ok(Self {
            engine,
            format: cli.format,
        })
    }
}

/// Physical parameters from either input form.
pub fn system_params(pt: &PointArgs) -> Result<SystemParams<f64>, CliError> {
    let physical = pt.j0.is_some() || pt.f0_physical.is_some();
    let normalized = pt.delta.is_some() || pt.f.is_some();
    let v0 = pt.v0.unwrap_or(1.0);
    let (mp, mm) = ((pt.m_plus + pt.m_minus) / 2.0, (pt.m_plus - pt.m_minus) / 2.0);
    match (physical, normalized) {
        (true, true) => Err(CliError::Usage(
            "use either --j0/--f0-physical or --delta/--f, not both".into(),
        )),
        (false, false) => Err(CliError::Usage("need --j0 and --f0-physical, or --delta and --f".into())),
        (true, false) => {
            let (Some(j0), Some(f0)) = (pt.j0, pt.f0_physical) else {
                return Err(CliError::Usage("physical input needs both --j0 and --f0-physical".into()));
            };
            Ok(SystemParams::new(mp, mm, v0, j0, f0)?)
        }
        (false, true) => {
            let (Some(d), Some(f)) = (pt.delta, pt.f) else {
                return Err(CliError::Usage("normalized input needs both --delta and --f".into()));
            };
            Ok(SystemParams::from_normalized(mp, mm, v0, d, f)?)
        }
    }
}

fn point_fields(p: &SystemParams<f64>) -> Record {
    vec![
        ("m_plus", Field::Num(p.mass_plus())),
        ("m_minus", Field::Num(p.mass_minus())),
        ("v0", Field::Num(p.v0)),
        ("j0", Field::Num(p.j0)),
        ("f0", Field::Num(p.f0)),
        ("delta0_hat", Field::Num(p.delta0_hat())),
        ("f0_hat", Field::Num(p.f0_hat())),
    ]
}

fn period_fields(prefix: &'static str, r: &PeriodResult<f64>) -> Record {
    let names: [&'static str; 4] = match prefix {
        "t_plus" => ["t_plus", "t_plus_err", "t_plus_representation", "t_plus_status"],
        "t_minus" => ["t_minus", "t_minus_err", "t_minus_representation", "t_minus_status"],
        _ => ["value", "err_estimate", "representation", "status"],
    };
    vec![
        (names[0], Field::Num(r.value)),
        (names[1], Field::Num(r.err_estimate)),
        (names[2], Field::Text(format!("{:?}", r.representation))),
        (names[3], Field::Text(format!("{:?}", r.status))),
    ]
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Ctx::new(cli)?;
    match &cli.command {
        Command::Classify(pt) => classify(&ctx, pt, out),
        Command::Period(a) => period(&ctx, a, out),
        Command::Rotation(a) => rotation(&ctx, a, out),
        Command::Scan(a) => scan(&ctx, a, out),
        Command::Verify { suite } => verify(&ctx, suite, out),
        Command::Oracle(a) => oracle(&ctx, a, out),
    }
}

fn emit(ctx: &Ctx, rec: &Record, out: &mut dyn Write) -> Result<(), CliError> {
    match ctx.format.unwrap_or(Format::Json) {
        Format::Json => crate::output::write_json(rec, out),
        Format::Csv => crate::output::write_csv(std::slice::from_ref(rec), out),
    }
}

fn classify(ctx: &Ctx, pt: &PointArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = system_params(pt)?;
    let (mp, mm, d, f) = (p.mass_plus(), p.mass_minus(), p.delta0_hat(), p.f0_hat());
    let phys = classify_in(mp, mm, d, f, WDomain::Physical);
    let ext = classify_in(mp, mm, d, f, WDomain::Extended);
    let mut rec = vec![
        ("region", Field::Text(phys.w_region.as_str().into())),
        ("region_extended", Field::Text(ext.w_region.as_str().into())),
        ("period_region_plus", Field::Text(format!("{:?}", phys.period_region_plus))),
        ("period_region_minus", Field::Text(format!("{:?}", phys.period_region_minus))),
        ("distance_to_singular_plus", Field::Num(phys.distance_to_singular_plus)),
        ("distance_to_singular_minus", Field::Num(phys.distance_to_singular_minus)),
        ("f_sing_plus", Field::Num(f_sing(mp, d))),
        ("f_sing_minus", Field::Num(f_sing(mm, d))),
    ];
    rec.extend(point_fields(&p));
    emit(ctx, &rec, out)
}

fn period(ctx: &Ctx, a: &PeriodArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = system_params(&a.point)?;
    let choice = match a.which {
        Which::Plus => MassChoice::Plus,
        Which::Minus => MassChoice::Minus,
    };
    let n: NormalizedParams<f64> = normalize(&p, choice)?;
    let e = &ctx.engine;
    let results: Vec<PeriodResult<f64>> = match a.repr {
        Repr::Auto => vec![e.t_of(&n)?],
        Repr::Down => vec![e.t_down(&n)?],
        Repr::Up => vec![e.t_up(&n)?],
        Repr::Star => vec![e.t_star(&n)?],
        Repr::Circ => vec![e.t_circ(&n)?],
        Repr::Jacobi => match a.which {
            Which::Plus => vec![e.jacobi_t_plus(&p)?],
            Which::Minus => e.jacobi_t_minus(&p)?,
        },
    };
    if results.iter().any(|r| r.status == PeriodStatus::OutOfDomain) {
        return Err(CliError::Domain(twocenter::Error::OutOfDomain("period")));
    }
    let rows: Vec<Record> = results
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut rec = vec![("mass", Field::Num(n.mass)), ("component", Field::Int(k as u64))];
            rec.extend(period_fields("", r));
            rec.extend(point_fields(&p));
            rec
        })
        .collect();
    match (ctx.format.unwrap_or(Format::Json), rows.len()) {
        (Format::Json, 1) => crate::output::write_json(&rows[0], out),
        (Format::Json, _) => crate::output::write_json_array(&rows, out),
        (Format::Csv, _) => crate::output::write_csv(&rows, out),
    }
}

fn rotation(ctx: &Ctx, a: &RotationArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = system_params(&a.point)?;
    let domain = if a.extended { WDomain::Extended } else { WDomain::Physical };
    let label = classify_in(p.mass_plus(), p.mass_minus(), p.delta0_hat(), p.f0_hat(), domain);
    let r = ctx.engine.rotation_number_at(&p, label.w_region)?;
    let mut rec = vec![
        ("w", Field::Num(r.w)),
        ("branch", Field::Text(format!("{:?}", r.branch))),
        ("region", Field::Text(label.w_region.as_str().into())),
    ];
    rec.extend(period_fields("t_plus", &r.t_plus));
    rec.extend(period_fields("t_minus", &r.t_minus));
    rec.extend(point_fields(&p));
    emit(ctx, &rec, out)
}

fn fiber(ctx: &Ctx, a: &ScanArgs) -> Result<twocenter::monotonicity::FiberScan<f64>, CliError> {
    if a.n < 2 || !(a.f_max > a.f_min) {
        return Err(CliError::Usage("need --n >= 2 and --f-max > --f-min".into()));
    }
    let config = ScanConfig {
        domain: if a.physical { WDomain::Physical } else { WDomain::Extended },
        exclusion: a.exclusion,
        engine: ctx.engine,
    };
    Ok(scan_fiber(a.m_plus, a.m_minus, a.delta, (a.f_min, a.f_max), a.n, &config)?)
}

pub const SCAN_HEADER: [&str; 6] = ["F0_hat", "T_plus", "T_minus", "W", "region", "dW_sign"];

fn scan(ctx: &Ctx, a: &ScanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let s = fiber(ctx, a)?;
    let sign = |k: usize| s.derivative_signs[k].map(|x| x.as_str()).unwrap_or("");
    match ctx.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
            w.write_record(SCAN_HEADER)?;
            for (k, x) in s.samples.iter().enumerate() {
                w.write_record([
                    fmt17(x.f0_hat),
                    fmt17(x.t_plus),
                    fmt17(x.t_minus),
                    fmt17(x.w),
                    x.region.as_str().to_string(),
                    sign(k).to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let rows: Vec<Record> = s
                .samples
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    vec![
                        ("f0_hat", Field::Num(x.f0_hat)),
                        ("t_plus", Field::Num(x.t_plus)),
                        ("t_minus", Field::Num(x.t_minus)),
                        ("w", Field::Num(x.w)),
                        ("region", Field::Text(x.region.as_str().into())),
                        ("dw_sign", Field::Text(sign(k).into())),
                    ]
                })
                .collect();
            crate::output::write_json_array(&rows, out)
        }
    }
}

fn summary(ctx: &Ctx, rec: &Record, ok: bool, out: &mut dyn Write) -> Result<(), CliError> {
    match ctx.format {
        Some(Format::Json) => {
            let mut r = rec.clone();
            r.push(("passed", Field::Bool(ok)));
            crate::output::write_json(&r, out)?;
        }
        Some(Format::Csv) => crate::output::write_csv(std::slice::from_ref(rec), out)?,
        None => {
            let line: Vec<String> = rec.iter().map(|(k, v)| format!("{k}={}", v.plain())).collect();
            writeln!(out, "{} status={}", line.join(" "), if ok { "pass" } else { "fail" })?;
        }
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn verify(ctx: &Ctx, suite: &Suite, out: &mut dyn Write) -> Result<(), CliError> {
    match suite {
        Suite::Lemma { samples, seed, tol } => {
            let spec = ctx.engine.periodic;
            let b = lemma_batch(*samples, *seed, &spec)?;
            let special = check_lemma(&real_ratio_samples((*samples / 50).max(100), *seed), &spec)?;
            let case = b.max_case_residual.max(special.max_case_residual);
            let worst = b.max_residual.max(special.max_residual);
            let rec = vec![
                ("max_residual", Field::Num(worst)),
                ("max_case_residual", Field::Num(case)),
                ("samples", Field::Int(*samples as u64)),
                ("seed", Field::Int(*seed)),
            ];
            summary(ctx, &rec, worst < *tol && case < *tol, out)
        }
        Suite::Kepler { n, tol } => {
            let n = (*n).max(1);
            let pts: Vec<(f64, f64)> = (0..n)
                .flat_map(|i| {
                    let d = 0.2 + 3.8 * (i as f64 + 0.5) / n as f64;
                    let (lo, hi) = f_boundaries(1.0, d);
                    let fs = f_sing(1.0, d);
                    (0..n)
                        .map(move |j| (d, lo + (hi - lo) * (j as f64 + 0.5) / n as f64))
                        .filter(move |&(_, f)| (f - fs).abs() > 1e-3)
                })
                .collect();
            let e = &ctx.engine;
            let res: Vec<f64> = pts
                .par_iter()
                .map(|&(d, f)| {
                    let p = SystemParams::from_normalized(1.0, 0.0, 1.0, d, f)?;
                    let tp = e.jacobi_t_plus(&p)?.value;
                    let tm = e.jacobi_t_minus(&p)?.iter().map(|r| r.value).sum::<f64>();
                    let t = e.t_of(&normalize(&p, MassChoice::Plus)?)?.value;
                    Ok([(tp - tm) / t, (tp - t) / t, (tm - t) / t].iter().fold(0.0f64, |m, v| m.max(v.abs())))
                })
                .collect::<twocenter::Result<Vec<_>>>()?;
            let worst = res.iter().fold(0.0f64, |m, &v| m.max(v));
            let rec = vec![("max_residual", Field::Num(worst)), ("points", Field::Int(pts.len() as u64))];
            summary(ctx, &rec, worst < *tol, out)
        }
        Suite::Corollary { samples, seed, tol } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let pts: Vec<(f64, f64)> = (0..*samples)
                .map(|_| {
                    let d: f64 = rng.random_range(0.05..1.95);
                    let hi = 1.0 + d * d / 4.0;
                    let f = d + (hi - d) * rng.random_range(0.02..0.98);
                    (d, f)
                })
                .collect();
            let res = pts
                .par_iter()
                .map(|&(d, f)| {
                    let (circ, two_re) = real_part_corollary_check(1.0, d, f, 1.0)?;
                    Ok(((circ - two_re) / circ).abs())
                })
                .collect::<twocenter::Result<Vec<f64>>>()?;
            let worst = res.iter().fold(0.0f64, |m, &v| m.max(v));
            let rec = vec![
                ("max_residual", Field::Num(worst)),
                ("samples", Field::Int(*samples as u64)),
                ("seed", Field::Int(*seed)),
            ];
            summary(ctx, &rec, worst < *tol, out)
        }
        Suite::Monotonicity(a) => {
            let s = fiber(ctx, a)?;
            let verdicts = s.verdicts();
            let violations: usize = verdicts.iter().map(|v| v.violations.len()).sum();
            let checked: usize = verdicts.iter().map(|v| v.n_signs).sum();
            let failed = verdicts
                .iter()
                .filter(|v| v.n_signs > 0 && !v.verified())
                .map(|v| format!("{:?}:{}", v.quantity, v.region))
                .collect::<Vec<_>>();
            let rec = vec![
                ("violations", Field::Int(violations as u64)),
                ("signs_checked", Field::Int(checked as u64)),
                ("failed", Field::Text(failed.join(","))),
            ];
            summary(ctx, &rec, failed.is_empty(), out)
        }
    }
}

fn oracle(ctx: &Ctx, a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let p = system_params(&a.point)?;
    let mut controls = OrbitControls::<f64>::default();
    if let Some(r) = a.rtol {
        if !(r > 0.0) {
            return Err(CliError::Usage("--rtol must be positive".into()));
        }
        controls.rtol = r;
        controls.atol = r * 1e-2;
    }
    let (per, traj) = oracle_periods(&p, a.oscillations.max(3), &controls)?;
    let np = normalize(&p, MassChoice::Plus)?;
    let tp = ctx.engine.t_of(&np)?;
    let tm = ctx.engine.t_of(&np.with_mass(p.mass_minus()))?;
    let (dj, df) = traj.drift();
    let mut rec = vec![
        ("t_plus_measured", Field::Num(per.t_plus)),
        ("t_minus_measured", Field::Num(per.t_minus)),
        ("t_plus_quadrature", Field::Num(tp.value)),
        ("t_minus_quadrature", Field::Num(tm.value)),
        ("t_plus_rel_err", Field::Num(((per.t_plus - tp.value) / tp.value).abs())),
        ("t_minus_rel_err", Field::Num(((per.t_minus - tm.value) / tm.value).abs())),
        ("t_plus_spread", Field::Num(per.t_plus_spread)),
        ("t_minus_spread", Field::Num(per.t_minus_spread)),
        ("j_drift", Field::Num(dj)),
        ("f_drift", Field::Num(df)),
        ("cofocal_residual", Field::Num(traj.cofocal_residual())),
        ("min_distance", Field::Num(traj.min_distance)),
        ("samples", Field::Int(traj.samples.len() as u64)),
    ];
    rec.extend(point_fields(&p));
    if let Some(path) = &a.trajectory {
        let file = std::fs::File::create(path)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
        w.write_record(["t", "tau", "x1", "x2", "y1", "y2", "alpha", "beta", "J", "F"])?;
        for s in &traj.samples {
            w.write_record(
                [s.t, s.tau, s.state.x[0], s.state.x[1], s.state.y[0], s.state.y[1], s.alpha, s.beta, s.j_val, s.f_val]
                    .map(fmt17),
            )?;
        }
        w.flush()?;
    }
    emit(ctx, &rec, out)
}
