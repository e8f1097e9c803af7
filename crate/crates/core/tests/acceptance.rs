//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixj_screen::exact::screen_oracle;
use sixj_screen::export::{write_screen_csv, CurveFile};
use sixj_screen::geometry::{
    caustic_y, coeff_errors, heron_area, lambda_quartic, max_volume, ridge_y, ridges_and_caustics, volume_sq,
    volume_sq_gram, Tetrahedron, XPrime,
};
use sixj_screen::ninej::{random_stencils, reduction_check, residual_sweep, StencilFilter};
use sixj_screen::recursion::{screen_by_eigensolve, tridiag_spectrum, TridiagCoeffs};
use sixj_screen::semiclassics::{bohr_sommerfeld, dihedral_angles, pr_compare, PrEntry};
use sixj_screen::{sixj_exact, Exec, Method, ScreenParams, SixJArgs, TwoJ};

const MID: [u32; 4] = [60, 90, 120, 110];
const LARGE: [u32; 4] = [600, 900, 1200, 1100];

fn params(q: [u32; 4]) -> ScreenParams {
    ScreenParams::new(q[0], q[1], q[2], q[3]).unwrap()
}

type Criterion = Box<dyn FnOnce() -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(f: impl FnOnce() -> Outcome, limit: Option<Duration>) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let dt = t.elapsed();
    o.detail = format!("{} ({:.2} s)", o.detail, dt.as_secs_f64());
    if let Some(limit) = limit {
        if dt > limit {
            o.pass = false;
            o.detail = format!("{}; over the {} s limit", o.detail, limit.as_secs());
        }
    }
    o
}

fn spectrum() -> Outcome {
    let (ev, lam) = tridiag_spectrum(&params(MID)).unwrap();
    let worst = ev.iter().zip(&lam).map(|(e, l)| (e - l).abs() / l.abs().max(1.0)).fold(0.0, f64::max);
    outcome(ev.len() == 61 && worst <= 1e-8, format!("{} eigenvalues, max relative error {worst:.2e}", ev.len()))
}

fn cross_agreement() -> Outcome {
    let p = params(MID);
    let exec = Exec::default();
    let oracle = screen_oracle(&p, exec);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for m in [Method::Eigensolve, Method::Recur2d, Method::ThreeTerm] {
        let s = m.compute(&p, exec).unwrap();
        let d = s.max_abs_diff(&oracle).unwrap();
        worst = worst.max(d);
        parts.push(format!("{m} {d:.1e}"));
    }
    outcome(oracle.values().len() == 3721 && worst <= 1e-8, format!("3721 entries vs oracle: {}", parts.join(", ")))
}

fn orthonormality() -> Outcome {
    let p = params(LARGE);
    let s = screen_by_eigensolve(&p, Exec::default()).unwrap();
    let d = s.diagnostics.orthonormality_defect;
    outcome(s.side() == 601 && d <= 1e-10, format!("601x601 eigensolve, defect {d:.2e}"))
}

fn random_sixj(rng: &mut ChaCha8Rng) -> (ScreenParams, TwoJ, TwoJ) {
    loop {
        let q: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..=40));
        if let Ok(p) = ScreenParams::new(q[0], q[1], q[2], q[3]) {
            let n = p.side();
            return (p, p.x_at(rng.gen_range(0..n)), p.y_at(rng.gen_range(0..n)));
        }
    }
}

fn exact_symmetries() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    for _ in 0..500 {
        let (p, x, y) = random_sixj(&mut rng);
        let (a, b, c, d) = (p.a.0, p.b.0, p.c.0, p.d.0);
        let six = |v: [u32; 6]| sixj_exact(SixJArgs::from_array(v));
        let base = six([a, b, x.0, c, d, y.0]);
        let r = p.regge().unwrap();
        let images = [
            six([b, a, x.0, d, c, y.0]),
            six([d, c, x.0, b, a, y.0]),
            six([c, d, x.0, a, b, y.0]),
            six([r.a.0, r.b.0, x.0, r.c.0, r.d.0, y.0]),
            six([a, d, y.0, c, b, x.0]),
        ];
        if base.is_zero() || images.iter().any(|v| *v != base) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("500 random sets, {failures} mismatches (classical, Regge, x-y exchange)"))
}

fn geometry_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut lam, mut root, mut vmax, mut gram) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let cases = 1000;
    for _ in 0..cases {
        // triangle identity
        let (a, b): (f64, f64) = (rng.gen_range(0.5..300.0), rng.gen_range(0.5..300.0));
        let c = (a - b).abs() + rng.gen::<f64>() * (a + b - (a - b).abs());
        let f = heron_area(a, b, c).unwrap();
        let scale = (a * a + b * b + c * c).powi(2);
        lam = lam.max((lambda_quartic(a, b, c) + 16.0 * f * f).abs() / scale);

        // caustics and ridge of a random screen column
        let (p, x, _) = random_big(&mut rng);
        let (ea, eb, ec, ed, ex) = (p.a.edge(), p.b.edge(), p.c.edge(), p.d.edge(), x.edge());
        if let (Some(vm), (Some(lo), Some(hi)), Some(ry)) =
            (max_volume(ea, eb, ec, ed, ex), caustic_y(ea, eb, ec, ed, ex), ridge_y(ea, eb, ec, ed, ex))
        {
            for z in [lo, hi] {
                let v2 = volume_sq(&Tetrahedron::new(ea, eb, ec, ed, ex, z));
                root = root.max(v2.abs() / (vm * vm));
            }
            let v = volume_sq(&Tetrahedron::new(ea, eb, ec, ed, ex, ry)).sqrt();
            vmax = vmax.max((v - vm).abs() / vm);
        }

        // two determinants on a random point cloud
        let pts: [[f64; 3]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-50.0..50.0)));
        let dist = |i: usize, j: usize| (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt();
        let t = Tetrahedron::new(dist(1, 2), dist(0, 2), dist(0, 3), dist(1, 3), dist(0, 1), dist(2, 3));
        let l6 = [t.a, t.b, t.c, t.d, t.x, t.y].iter().fold(0.0f64, |m, v| m.max(*v)).powi(6);
        gram = gram.max((volume_sq(&t) - volume_sq_gram(&t)).abs() / l6);
    }
    let pass = lam <= 1e-12 && root <= 1e-9 && vmax <= 1e-10 && gram <= 1e-10;
    outcome(
        pass,
        format!("{cases} cases each: quartic {lam:.1e}, caustic roots {root:.1e}, ridge volume {vmax:.1e}, determinants {gram:.1e}"),
    )
}

fn random_big(rng: &mut ChaCha8Rng) -> (ScreenParams, TwoJ, TwoJ) {
    loop {
        let q: [u32; 4] = std::array::from_fn(|_| rng.gen_range(20..=800));
        if let Ok(p) = ScreenParams::new(q[0], q[1], q[2], q[3]) {
            let n = p.side();
            return (p, p.x_at(rng.gen_range(0..n)), p.y_at(rng.gen_range(0..n)));
        }
    }
}

fn regge_invariance() -> Outcome {
    let p = params(MID);
    let r = p.regge().unwrap();
    let exec = Exec::default();
    let (u, v) = (screen_oracle(&p, exec), screen_oracle(&r, exec));
    let grid = u.values().iter().zip(v.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (cu, cv) = (ridges_and_caustics(&p, exec), ridges_and_caustics(&r, exec));
    let opt = |a: &[Option<f64>], b: &[Option<f64>]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(s, t)| match (s, t) {
                (Some(s), Some(t)) => (s - t).abs() / s.abs().max(1.0),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    };
    let curves = [
        opt(&cu.y_ridge, &cv.y_ridge),
        opt(&cu.x_ridge, &cv.x_ridge),
        opt(&cu.v_max, &cv.v_max),
        opt(&cu.y_caustic_minus, &cv.y_caustic_minus),
        opt(&cu.y_caustic_plus, &cv.y_caustic_plus),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    outcome(grid <= 1e-12 && curves <= 1e-12, format!("grid {grid:.1e}, curves {curves:.1e}"))
}

fn geometric_coefficients() -> Outcome {
    let p = params(LARGE);
    let t = TridiagCoeffs::new(&p).unwrap();
    let n = p.side();
    let (lo, hi) = (n / 4, 3 * n / 4);
    let (mut pp, mut wl, mut mean) = (0.0f64, 0.0f64, 0.0f64);
    for ix in lo..=hi {
        for iy in lo..=hi {
            let e = coeff_errors(&t, ix, iy, XPrime::ShiftedProduct).unwrap();
            pp = pp.max(e.p_plus);
            wl = wl.max(e.w_lambda);
            mean = mean.max(e.p_plus_mean);
        }
    }
    let pass = pp <= 1e-3 && wl <= 1e-3 && mean > pp;
    outcome(pass, format!("middle half: p+ {pp:.2e}, w-lambda {wl:.2e}; geometric-mean p+ {mean:.2e}"))
}

fn ponzano_regge() -> Outcome {
    let p = params(LARGE);
    let exec = Exec::default();
    let s = screen_by_eigensolve(&p, exec).unwrap();
    // spot-check the reference screen against exact values
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = p.side();
    let spot = (0..20)
        .map(|_| {
            let (ix, iy) = (rng.gen_range(0..n), rng.gen_range(0..n));
            (s.get(ix, iy) - sixj_screen::u_exact(p.x_at(ix), p.y_at(iy), &p).unwrap().to_f64()).abs()
        })
        .fold(0.0, f64::max);
    let cmp = pr_compare(&s, exec);
    let (i, c) = (cmp.summary.interior, cmp.summary.caustic_band);
    // informational: the same interior set restricted to points where no
    // dihedral angle is near 0 or pi (screen edges are degenerate faces)
    let mut bounded = 0.0f64;
    for ix in 0..n {
        for iy in 0..n {
            if let PrEntry::Classical(pt) = cmp.get(ix, iy) {
                if pt.cos_theta3.abs() > 0.5 || pt.near_node() {
                    continue;
                }
                let t = Tetrahedron::at(&p, p.x_at(ix), p.y_at(iy));
                if dihedral_angles(&t).is_ok_and(|a| a.as_array().iter().all(|v| v.cos().abs() <= 0.9)) {
                    bounded = bounded.max(pt.rel_error);
                }
            }
        }
    }
    let pass = spot <= 1e-10 && i.max_rel_error <= 0.05 && i.sign_agreement >= 0.99 && c.max_rel_error > i.max_rel_error;
    outcome(
        pass,
        format!(
            "interior {} pts: max rel {:.2e}, sign {:.4}; near-caustic max rel {:.2e}; all dihedrals |cos|<=0.9 max rel {bounded:.2e}; reference spot check {spot:.1e}",
            i.count, i.max_rel_error, i.sign_agreement, c.max_rel_error
        ),
    )
}

fn bohr_sommerfeld_ladder() -> Outcome {
    let p = params(LARGE);
    let n = p.side();
    let rows: Vec<usize> = (n / 2 - n / 10..=n / 2 + n / 10).collect();
    let est: Vec<f64> = rows.iter().map(|&iy| bohr_sommerfeld(p.y_at(iy), &p).unwrap().n_estimate).collect();
    let steps: Vec<f64> = est.windows(2).map(|w| w[1] - w[0]).collect();
    let (lo, hi) = steps.iter().fold((f64::INFINITY, 0.0f64), |(l, h), s| (l.min(s.abs()), h.max(s.abs())));
    let same_sign = steps.iter().all(|s| s.signum() == steps[0].signum());
    outcome(
        same_sign && lo >= 0.9 && hi <= 1.1,
        format!("{} row pairs: |step| in [{lo:.3}, {hi:.3}], direction {}", steps.len(), if steps[0] < 0.0 { "down in y" } else { "up in y" }),
    )
}

fn ninej_recurrence() -> Outcome {
    let stencils = random_stencils(&StencilFilter::default());
    let sweep = residual_sweep(&stencils, Exec::default());
    let red = reduction_check(&params(MID), Exec::default());
    let pass = stencils.len() == 100 && sweep.max_relative_residual <= 1e-10 && red.max_ratio_deviation <= 1e-9;
    outcome(
        pass,
        format!(
            "{} stencils: residual {:.1e}; reduction over {} stencils: ratio deviation {:.1e}",
            stencils.len(),
            sweep.max_relative_residual,
            red.stencils,
            red.max_ratio_deviation
        ),
    )
}

fn compute_bytes(exec: Exec) -> Vec<u8> {
    let p = params(MID);
    let mut out = Vec::new();
    for m in Method::ALL {
        write_screen_csv(&mut out, &m.compute(&p, exec).unwrap()).unwrap();
    }
    let c = ridges_and_caustics(&p, exec);
    let mut f = CurveFile::new(&p);
    f.add("caustics", c.caustic_points()).add("ridges", c.ridge_points());
    f.write(&mut out).unwrap();
    out
}

fn determinism() -> Outcome {
    let first = compute_bytes(Exec::Parallel);
    let second = compute_bytes(Exec::Parallel);
    let sequential = compute_bytes(Exec::Sequential);
    outcome(
        first == second && first == sequential,
        format!("{} bytes of screens and curves, repeated and sequential runs identical", first.len()),
    )
}

fn main() {
    let criteria: Vec<(&str, Criterion, Option<u64>)> = vec![
        ("spectrum match", Box::new(spectrum), Some(1)),
        ("method cross-agreement", Box::new(cross_agreement), Some(30)),
        ("orthonormality at 601x601", Box::new(orthonormality), Some(60)),
        ("exact symmetries", Box::new(exact_symmetries), None),
        ("geometry identities", Box::new(geometry_identities), None),
        ("Regge invariance on the screen", Box::new(regge_invariance), None),
        ("geometric coefficient accuracy", Box::new(geometric_coefficients), None),
        ("Ponzano-Regge accuracy", Box::new(ponzano_regge), None),
        ("Bohr-Sommerfeld ladder", Box::new(bohr_sommerfeld_ladder), None),
        ("9j recurrence and reduction", Box::new(ninej_recurrence), None),
        ("determinism", Box::new(determinism), None),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.into_iter().enumerate() {
        let o = timed(f, limit.map(Duration::from_secs));
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {}: {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
