//! `verify`: invariant suites of every module at a chosen screen, plus an
//! optional golden-file comparison.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixj_screen::exact::screen_oracle;
use sixj_screen::export::{read_screen_csv, write_screen_csv, CurveFile, TOOL_VERSION};
use sixj_screen::geometry::{
    caustic_y, coeff_errors, heron_area, lambda_quartic, max_volume, ridge_y, ridges_and_caustics, volume_sq,
    volume_sq_gram, CausticData, Tetrahedron, XPrime,
};
use sixj_screen::ninej::{random_stencils, reduction_check, residual_sweep, StencilFilter};
use sixj_screen::recursion::{tridiag_spectrum, FiveTermCoeffs, TridiagCoeffs};
use sixj_screen::semiclassics::{bohr_sommerfeld, pr_compare};
use sixj_screen::{sixj_exact, Exec, Method, Screen, ScreenParams, SixJArgs, TwoJ};

use crate::failure::Failure;
use crate::report::{Bound, Check, Report, ReportFormat};
use crate::ParamArgs;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckName {
    Spectrum,
    MethodAgreement,
    Orthonormality,
    RecursionResidual,
    ExactSymmetries,
    TriangleQuartic,
    CausticRoots,
    RidgeVolume,
    VolumeDeterminants,
    ReggeInvariance,
    CoefficientAccuracy,
    CoefficientOrdering,
    PrOrdering,
    PrSign,
    BohrSommerfeld,
    NinejRecurrence,
    NinejReduction,
    Determinism,
    RoundTrip,
    GoldenFile,
}

impl CheckName {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    /// Default threshold and how the measurement is held against it.
    fn bound(self) -> (Bound, f64) {
        use CheckName::*;
        match self {
            Spectrum | MethodAgreement => (Bound::AtMost, 1e-8),
            Orthonormality | RecursionResidual | NinejRecurrence => (Bound::AtMost, 1e-10),
            ExactSymmetries | Determinism | RoundTrip => (Bound::AtMost, 0.0),
            TriangleQuartic | ReggeInvariance | GoldenFile => (Bound::AtMost, 1e-12),
            CausticRoots | NinejReduction => (Bound::AtMost, 1e-9),
            RidgeVolume | VolumeDeterminants => (Bound::AtMost, 1e-10),
            CoefficientAccuracy => (Bound::AtMost, 1e-3),
            CoefficientOrdering | PrOrdering => (Bound::Above, 1.0),
            PrSign => (Bound::AtLeast, 0.99),
            BohrSommerfeld => (Bound::AtMost, 0.1),
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Run only these checks (repeatable).
    #[arg(long = "check", value_enum)]
    checks: Vec<CheckName>,
    /// Screen CSV to compare against a fresh computation.
    #[arg(long)]
    golden: Option<PathBuf>,
    /// Random cases per identity and symmetry check.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Override a threshold, as `check=value` (repeatable).
    #[arg(long = "tolerance", value_parser = parse_tolerance)]
    tolerances: Vec<(CheckName, f64)>,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

fn parse_tolerance(s: &str) -> Result<(CheckName, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected check=value")?;
    let name = CheckName::from_str(k.trim(), false)?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad number {v:?}"))?;
    Ok((name, v))
}

/// Shared state for one verify run; expensive screens are built once.
struct Ctx {
    params: ScreenParams,
    exec: Exec,
    samples: usize,
    seed: u64,
    oracle: OnceCell<Screen>,
    eigen: OnceCell<Result<Screen, Failure>>,
}

impl Ctx {
    fn oracle(&self) -> &Screen {
        self.oracle.get_or_init(|| screen_oracle(&self.params, self.exec))
    }

    fn eigen(&self) -> Result<&Screen, String> {
        self.eigen
            .get_or_init(|| Method::Eigensolve.compute(&self.params, self.exec).map_err(Failure::from))
            .as_ref()
            .map_err(|e| e.to_string())
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
    }
}

pub fn run(args: VerifyArgs) -> Result<(), Failure> {
    let params = args.params.params()?;
    let mut selected = if args.checks.is_empty() {
        CheckName::value_variants().iter().copied().filter(|c| *c != CheckName::GoldenFile || args.golden.is_some()).collect()
    } else {
        args.checks.clone()
    };
    selected.sort();
    selected.dedup();
    if selected.contains(&CheckName::GoldenFile) && args.golden.is_none() {
        return Err(Failure::Usage("check golden-file needs --golden FILE".into()));
    }
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let overrides: BTreeMap<CheckName, f64> = args.tolerances.iter().copied().collect();

    let ctx = Ctx {
        params,
        exec: Exec::default(),
        samples: args.samples,
        seed: args.seed,
        oracle: OnceCell::new(),
        eigen: OnceCell::new(),
    };
    let mut report = Report::default();
    let [a, b, c, d] = params.quadruple();
    report.context.insert("params".into(), format!("two_a={a} two_b={b} two_c={c} two_d={d}"));
    report.context.insert("kappa2".into(), params.kappa2.to_string());
    report.context.insert("tool_version".into(), TOOL_VERSION.into());

    // geometry identities share one sampling pass
    let mut geometry: Option<[f64; 4]> = None;
    for name in selected {
        let t = Instant::now();
        let (bound, default) = name.bound();
        let threshold = overrides.get(&name).copied().unwrap_or(default);
        let check = |m: f64, detail: String| Check::new(&name.name(), m, bound, threshold, detail);
        let broken = |why: String| Check::broken(&name.name(), bound, threshold, why);
        let result = match name {
            CheckName::TriangleQuartic | CheckName::CausticRoots | CheckName::RidgeVolume | CheckName::VolumeDeterminants => {
                let g = *geometry.get_or_insert_with(|| geometry_identities(&ctx));
                let k = match name {
                    CheckName::TriangleQuartic => 0,
                    CheckName::CausticRoots => 1,
                    CheckName::RidgeVolume => 2,
                    _ => 3,
                };
                check(g[k], format!("{} random cases", ctx.samples))
            }
            CheckName::GoldenFile => golden(&ctx, args.golden.as_ref().expect("checked above")).map_or_else(broken, |(m, d)| check(m, d)),
            _ => measure(name, &ctx).map_or_else(broken, |(m, d)| check(m, d)),
        };
        report.push_timed(vec![result], t.elapsed());
    }
    report.finish(args.report)
}

type Measured = Result<(f64, String), String>;

fn measure(name: CheckName, ctx: &Ctx) -> Measured {
    let p = &ctx.params;
    let n = p.side();
    match name {
        CheckName::Spectrum => {
            let (ev, lam) = tridiag_spectrum(p).map_err(|e| e.to_string())?;
            let worst = ev.iter().zip(&lam).map(|(e, l)| (e - l).abs() / l.abs().max(1.0)).fold(0.0, f64::max);
            Ok((worst, format!("{} eigenvalues against lambda(y)", ev.len())))
        }
        CheckName::MethodAgreement => {
            let oracle = ctx.oracle();
            let mut worst = 0.0f64;
            let mut parts = Vec::new();
            for m in [Method::Eigensolve, Method::ThreeTerm, Method::Recur2d] {
                let s = m.compute(p, ctx.exec).map_err(|e| format!("{m}: {e}"))?;
                let d = s.max_abs_diff(oracle).map_err(|e| e.to_string())?;
                worst = worst.max(d);
                parts.push(format!("{m} {d:.1e}"));
            }
            Ok((worst, format!("{} entries vs oracle: {}", oracle.values().len(), parts.join(", "))))
        }
        CheckName::Orthonormality => {
            let s = ctx.eigen()?;
            Ok((s.diagnostics.orthonormality_defect, format!("{n}x{n} eigensolve screen")))
        }
        CheckName::RecursionResidual => {
            // |U| <= 1 and the screen is accurate in absolute terms, so the
            // residual is scaled by the coefficients, not by the terms
            let s = ctx.eigen()?;
            let five = FiveTermCoeffs::new(p);
            let mut worst = 0.0f64;
            for ix in 0..n {
                for iy in 0..n {
                    let (r, _) = five.residual_at(ix, iy, |i, j| s.get(i, j));
                    let scale = five.stencil(ix, iy).iter().fold(0.0f64, |m, c| m.max(c.abs()));
                    if scale > 0.0 {
                        worst = worst.max(r / scale);
                    }
                }
            }
            Ok((worst, "five-term relation on the eigensolve screen, per unit coefficient".into()))
        }
        CheckName::ExactSymmetries => Ok(exact_symmetries(ctx)),
        CheckName::ReggeInvariance => regge_invariance(ctx),
        CheckName::CoefficientAccuracy | CheckName::CoefficientOrdering => {
            let t = TridiagCoeffs::new(p).map_err(|e| e.to_string())?;
            let (lo, hi) = (n / 4, 3 * n / 4);
            let (mut pp, mut wl, mut mean) = (0.0f64, 0.0f64, 0.0f64);
            for ix in lo..=hi {
                for iy in lo..=hi {
                    let e = coeff_errors(&t, ix, iy, XPrime::ShiftedProduct).map_err(|e| e.to_string())?;
                    pp = pp.max(e.p_plus);
                    wl = wl.max(e.w_lambda);
                    mean = mean.max(e.p_plus_mean);
                }
            }
            if name == CheckName::CoefficientAccuracy {
                Ok((pp.max(wl), format!("middle half: p+ {pp:.2e}, w-lambda {wl:.2e}")))
            } else {
                Ok((mean / pp, format!("geometric-mean p+ error {mean:.2e} over direct {pp:.2e}")))
            }
        }
        CheckName::PrOrdering | CheckName::PrSign => {
            let cmp = pr_compare(ctx.eigen()?, ctx.exec);
            let (i, c) = (cmp.summary.interior, cmp.summary.caustic_band);
            if i.count == 0 {
                return Err("no interior points".into());
            }
            if name == CheckName::PrSign {
                Ok((i.sign_agreement, format!("{} interior points, max rel error {:.2e}", i.count, i.max_rel_error)))
            } else {
                Ok((
                    c.max_rel_error / i.max_rel_error,
                    format!("near-caustic max rel {:.2e} over interior {:.2e}", c.max_rel_error, i.max_rel_error),
                ))
            }
        }
        CheckName::BohrSommerfeld => {
            let rows: Vec<usize> = (n / 2 - n / 10..=n / 2 + n / 10).collect();
            let est = rows
                .iter()
                .map(|&iy| bohr_sommerfeld(p.y_at(iy), p).map(|b| b.n_estimate))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| e.to_string())?;
            let steps: Vec<f64> = est.windows(2).map(|w| w[1] - w[0]).collect();
            if steps.is_empty() {
                return Err("screen too small for a ladder".into());
            }
            let same_sign = steps.iter().all(|s| s.signum() == steps[0].signum());
            let dev = steps.iter().map(|s| (s.abs() - 1.0).abs()).fold(0.0, f64::max);
            Ok((if same_sign { dev } else { f64::INFINITY }, format!("{} central row pairs", steps.len())))
        }
        CheckName::NinejRecurrence => {
            let st = random_stencils(&StencilFilter { seed: ctx.seed, ..StencilFilter::default() });
            if st.is_empty() {
                return Err("no admissible stencils".into());
            }
            let r = residual_sweep(&st, ctx.exec);
            Ok((r.max_relative_residual, format!("{} random stencils", r.stencils)))
        }
        CheckName::NinejReduction => {
            let r = reduction_check(p, ctx.exec);
            Ok((r.max_ratio_deviation, format!("{} stencils, {} skipped", r.stencils, r.skipped)))
        }
        CheckName::Determinism => {
            let first = output_bytes(p, Exec::Parallel)?;
            let second = output_bytes(p, Exec::Parallel)?;
            let seq = output_bytes(p, Exec::Sequential)?;
            let differing = [&second, &seq].iter().filter(|o| ***o != first).count();
            Ok((differing as f64, format!("{} bytes of screens and curves, three runs", first.len())))
        }
        CheckName::RoundTrip => {
            let s = ctx.eigen()?;
            let mut buf = Vec::new();
            write_screen_csv(&mut buf, s).map_err(|e| e.to_string())?;
            let back = read_screen_csv(buf.as_slice()).map_err(|e| e.to_string())?;
            let d = back.max_abs_diff(s).map_err(|e| e.to_string())?;
            Ok((d, "csv write then read".into()))
        }
        _ => unreachable!("measured elsewhere"),
    }
}

fn output_bytes(p: &ScreenParams, exec: Exec) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    for m in [Method::Eigensolve, Method::Recur2d] {
        let s = m.compute(p, exec).map_err(|e| e.to_string())?;
        write_screen_csv(&mut out, &s).map_err(|e| e.to_string())?;
    }
    let c = ridges_and_caustics(p, exec);
    let mut f = CurveFile::new(p);
    f.add("caustics", c.caustic_points()).add("ridges", c.ridge_points());
    f.write(&mut out).map_err(|e| e.to_string())?;
    Ok(out)
}

fn golden(ctx: &Ctx, path: &PathBuf) -> Measured {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let g = read_screen_csv(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?;
    let fresh = g.method.compute(&g.params, ctx.exec).map_err(|e| e.to_string())?;
    let d = fresh.max_abs_diff(&g).map_err(|e| e.to_string())?;
    let n = g.params.side();
    Ok((d, format!("{} {n}x{n} screen from {}", g.method, path.display())))
}

fn random_args(rng: &mut ChaCha8Rng, max: u32) -> (ScreenParams, TwoJ, TwoJ) {
    loop {
        let q: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..=max));
        if let Ok(p) = ScreenParams::new(q[0], q[1], q[2], q[3]) {
            let n = p.side();
            return (p, p.x_at(rng.gen_range(0..n)), p.y_at(rng.gen_range(0..n)));
        }
    }
}

/// Classical, Regge and x-y exchange images in exact arithmetic.
fn exact_symmetries(ctx: &Ctx) -> (f64, String) {
    let mut rng = ctx.rng(4);
    let mut mismatches = 0;
    for _ in 0..ctx.samples {
        let (p, x, y) = random_args(&mut rng, 40);
        let (a, b, c, d) = (p.a.0, p.b.0, p.c.0, p.d.0);
        let six = |v: [u32; 6]| sixj_exact(SixJArgs::from_array(v));
        let base = six([a, b, x.0, c, d, y.0]);
        let r = match p.regge() {
            Ok(r) => r,
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        let images = [
            six([b, a, x.0, d, c, y.0]),
            six([d, c, x.0, b, a, y.0]),
            six([c, d, x.0, a, b, y.0]),
            six([r.a.0, r.b.0, x.0, r.c.0, r.d.0, y.0]),
            six([a, d, y.0, c, b, x.0]),
        ];
        if images.iter().any(|v| *v != base) {
            mismatches += 1;
        }
    }
    (mismatches as f64, format!("{} random sets, mismatching images", ctx.samples))
}

/// Worst relative errors of: the triangle quartic, caustic roots of the
/// volume, the largest volume on the ridge, and Cayley-Menger vs Gram.
fn geometry_identities(ctx: &Ctx) -> [f64; 4] {
    let mut rng = ctx.rng(5);
    let mut worst = [0.0f64; 4];
    for _ in 0..ctx.samples {
        let (a, b): (f64, f64) = (rng.gen_range(0.5..300.0), rng.gen_range(0.5..300.0));
        let c = (a - b).abs() + rng.gen::<f64>() * (a + b - (a - b).abs());
        if let Ok(f) = heron_area(a, b, c) {
            let scale = (a * a + b * b + c * c).powi(2);
            worst[0] = worst[0].max((lambda_quartic(a, b, c) + 16.0 * f * f).abs() / scale);
        }

        let (p, x, _) = random_args(&mut rng, 800);
        let (ea, eb, ec, ed, ex) = (p.a.edge(), p.b.edge(), p.c.edge(), p.d.edge(), x.edge());
        if let (Some(vm), (Some(lo), Some(hi)), Some(ry)) =
            (max_volume(ea, eb, ec, ed, ex), caustic_y(ea, eb, ec, ed, ex), ridge_y(ea, eb, ec, ed, ex))
        {
            for z in [lo, hi] {
                let v2 = volume_sq(&Tetrahedron::new(ea, eb, ec, ed, ex, z));
                worst[1] = worst[1].max(v2.abs() / (vm * vm));
            }
            let v = volume_sq(&Tetrahedron::new(ea, eb, ec, ed, ex, ry)).sqrt();
            worst[2] = worst[2].max((v - vm).abs() / vm);
        }

        let pts: [[f64; 3]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-50.0..50.0)));
        let dist = |i: usize, j: usize| (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt();
        let t = Tetrahedron::new(dist(1, 2), dist(0, 2), dist(0, 3), dist(1, 3), dist(0, 1), dist(2, 3));
        let l6 = [t.a, t.b, t.c, t.d, t.x, t.y].iter().fold(0.0f64, |m, v| m.max(*v)).powi(6);
        worst[3] = worst[3].max((volume_sq(&t) - volume_sq_gram(&t)).abs() / l6);
    }
    worst
}

fn regge_invariance(ctx: &Ctx) -> Measured {
    let p = &ctx.params;
    let r = p.regge().map_err(|e| e.to_string())?;
    let u = ctx.oracle();
    let v = screen_oracle(&r, ctx.exec);
    let grid = u.values().iter().zip(v.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (cu, cv) = (ridges_and_caustics(p, ctx.exec), ridges_and_caustics(&r, ctx.exec));
    let curves = curve_gap(&cu, &cv);
    Ok((grid.max(curves), format!("grid {grid:.1e}, curves {curves:.1e}")))
}

fn curve_gap(u: &CausticData, v: &CausticData) -> f64 {
    let gap = |a: &[Option<f64>], b: &[Option<f64>]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(s, t)| match (s, t) {
                (Some(s), Some(t)) => (s - t).abs() / s.abs().max(1.0),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    };
    [
        gap(&u.y_ridge, &v.y_ridge),
        gap(&u.x_ridge, &v.x_ridge),
        gap(&u.v_max, &v.v_max),
        gap(&u.y_caustic_minus, &v.y_caustic_minus),
        gap(&u.y_caustic_plus, &v.y_caustic_plus),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}
