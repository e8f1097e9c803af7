//! `compute`: build one screen and write the requested grids and curves.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;

use sixj_screen::export::{fmt_f64, write_screen_csv, write_screen_json, write_table, CurveFile, Header};
use sixj_screen::geometry::{cos_theta3_field, potentials, ridges_and_caustics, PBar, XPrime};
use sixj_screen::semiclassics::{pr_compare, PrEntry, PrSummary};
use sixj_screen::{Exec, Method, Screen, ScreenParams};

use crate::failure::Failure;
use crate::{Format, OutDir, ParamArgs};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Screen,
    Caustics,
    Ridges,
    Potentials,
    #[value(name = "cos-theta3")]
    CosTheta3,
    PrCompare,
}

impl Output {
    fn name(self) -> &'static str {
        match self {
            Output::Screen => "screen",
            Output::Caustics => "caustics",
            Output::Ridges => "ridges",
            Output::Potentials => "potentials",
            Output::CosTheta3 => "cos-theta3",
            Output::PrCompare => "pr-compare",
        }
    }

    fn needs_screen(self) -> bool {
        matches!(self, Output::Screen | Output::PrCompare)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Oracle,
    Eigensolve,
    Threeterm,
    Recur2d,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Oracle => Method::Oracle,
            MethodArg::Eigensolve => Method::Eigensolve,
            MethodArg::Threeterm => Method::ThreeTerm,
            MethodArg::Recur2d => Method::Recur2d,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PBarArg {
    Arithmetic,
    Geometric,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum XPrimeArg {
    Shifted,
    Plain,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "eigensolve")]
    method: MethodArg,
    /// Comma-separated list of outputs.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "screen")]
    output: Vec<Output>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: OutDir,
    /// Average coupling used for the potentials.
    #[arg(long, value_enum, default_value = "arithmetic")]
    pbar: PBarArg,
    /// Length X' in the dihedral cosine of the cos-theta3 field.
    #[arg(long, value_enum, default_value = "shifted")]
    xprime: XPrimeArg,
    /// Largest orthonormality defect accepted before reporting a numerical failure.
    #[arg(long, default_value_t = 1e-8)]
    max_defect: f64,
}

/// Validated configuration of one `compute` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ScreenParams,
    pub method: Method,
    pub outputs: Vec<Output>,
    pub format: Format,
    pub out_dir: PathBuf,
    pub pbar: PBar,
    pub xprime: XPrime,
    pub max_defect: f64,
}

impl RunConfig {
    pub fn from_args(a: ComputeArgs) -> Result<Self, Failure> {
        let params = a.params.params()?;
        let mut outputs = a.output;
        outputs.sort();
        outputs.dedup();
        if outputs.is_empty() {
            return Err(Failure::Usage("no outputs requested".into()));
        }
        if a.max_defect.is_nan() || a.max_defect <= 0.0 {
            return Err(Failure::Usage("--max-defect must be positive".into()));
        }
        Ok(RunConfig {
            params,
            method: a.method.into(),
            outputs,
            format: a.format,
            out_dir: a.out.out_dir,
            pbar: match a.pbar {
                PBarArg::Arithmetic => PBar::Arithmetic,
                PBarArg::Geometric => PBar::Geometric,
            },
            xprime: match a.xprime {
                XPrimeArg::Shifted => XPrime::ShiftedProduct,
                XPrimeArg::Plain => XPrime::Plain,
            },
            max_defect: a.max_defect,
        })
    }

    fn stem(&self, out: Output) -> String {
        let [a, b, c, d] = self.params.quadruple();
        let base = format!("{}_{a}_{b}_{c}_{d}", out.name());
        if out.needs_screen() {
            format!("{base}_{}", self.method)
        } else {
            base
        }
    }

    pub fn path(&self, out: Output) -> PathBuf {
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        self.out_dir.join(format!("{}.{ext}", self.stem(out)))
    }
}

pub fn run(args: ComputeArgs) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Failure::io(&cfg.out_dir, e))?;
    let exec = Exec::default();
    let t0 = Instant::now();

    let screen = if cfg.outputs.iter().any(|o| o.needs_screen()) {
        let s = cfg.method.compute(&cfg.params, exec)?;
        let defect = s.diagnostics.orthonormality_defect;
        if defect.is_nan() || defect > cfg.max_defect {
            return Err(Failure::Numerical(format!(
                "orthonormality defect {defect:.3e} exceeds {:.1e} ({} screen)",
                cfg.max_defect, cfg.method
            )));
        }
        Some(s)
    } else {
        None
    };

    let mut written = Vec::new();
    for &out in &cfg.outputs {
        let path = cfg.path(out);
        write_output(&cfg, out, screen.as_ref(), exec, &path)?;
        written.push(path);
    }

    let n = cfg.params.side();
    println!("dimensions={n}x{n}");
    println!("method={}", cfg.method);
    match &screen {
        Some(s) => println!("orthonormality_defect={:.3e}", s.diagnostics.orthonormality_defect),
        None => println!("orthonormality_defect=n/a"),
    }
    println!("wall_time_s={:.3}", t0.elapsed().as_secs_f64());
    for p in written {
        println!("wrote={}", p.display());
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::io(path, e))
}

fn write_output(cfg: &RunConfig, out: Output, screen: Option<&Screen>, exec: Exec, path: &Path) -> Result<(), Failure> {
    let mut w = create(path)?;
    let p = &cfg.params;
    match out {
        Output::Screen => {
            let s = screen.expect("screen computed");
            match cfg.format {
                Format::Csv => write_screen_csv(&mut w, s)?,
                Format::Json => write_screen_json(&mut w, s)?,
            }
        }
        Output::Caustics => {
            let c = ridges_and_caustics(p, exec);
            let lower = pairs(&c.x, &c.y_caustic_minus, false);
            let upper = pairs(&c.x, &c.y_caustic_plus, false);
            write_curves(&mut w, cfg, &[("caustic_minus", lower), ("caustic_plus", upper)])?;
        }
        Output::Ridges => {
            let c = ridges_and_caustics(p, exec);
            let in_x = pairs(&c.x, &c.y_ridge, false);
            let in_y = pairs(&c.y, &c.x_ridge, true);
            write_curves(&mut w, cfg, &[("ridge_y_of_x", in_x), ("ridge_x_of_y", in_y)])?;
        }
        Output::Potentials => {
            let pc = potentials(p, cfg.pbar)?;
            let xs: Vec<f64> = pc.x.iter().map(|x| x.edge()).collect();
            match cfg.format {
                Format::Csv => {
                    let mut h = Header::for_params(p);
                    h.push("pbar", pbar_name(cfg.pbar));
                    let rows = (0..xs.len()).map(|i| vec![fmt_f64(xs[i]), fmt_f64(pc.w_plus[i]), fmt_f64(pc.w_minus[i])]);
                    write_table(&mut w, &h, &["X", "w_plus", "w_minus"], rows)?;
                }
                Format::Json => {
                    let mut f = CurveFile::new(p);
                    f.meta.insert("pbar".into(), pbar_name(cfg.pbar).into());
                    f.add("w_plus", xs.iter().zip(&pc.w_plus).map(|(&x, &v)| [x, v]).collect());
                    f.add("w_minus", xs.iter().zip(&pc.w_minus).map(|(&x, &v)| [x, v]).collect());
                    f.write(&mut w)?;
                }
            }
        }
        Output::CosTheta3 => {
            let field = cos_theta3_field(p, cfg.xprime, exec);
            let n = p.side();
            let mut h = Header::for_params(p);
            h.push("xprime", xprime_name(cfg.xprime));
            match cfg.format {
                Format::Csv => {
                    let rows = (0..n).flat_map(|iy| (0..n).map(move |ix| (ix, iy))).map(|(ix, iy)| {
                        vec![p.x_at(ix).0.to_string(), p.y_at(iy).0.to_string(), opt(field[ix * n + iy])]
                    });
                    write_table(&mut w, &h, &["two_x", "two_y", "cos_theta3"], rows)?;
                }
                Format::Json => {
                    let rows: Vec<Vec<Option<f64>>> = (0..n).map(|iy| (0..n).map(|ix| field[ix * n + iy]).collect()).collect();
                    write_json(&mut w, &FieldJson { meta: h.entries.into_iter().collect(), rows })?;
                }
            }
        }
        Output::PrCompare => {
            let s = screen.expect("screen computed");
            let cmp = pr_compare(s, exec);
            let n = p.side();
            let h = Header::for_screen(s);
            match cfg.format {
                Format::Csv => {
                    let rows = (0..n).flat_map(|iy| (0..n).map(move |ix| (ix, iy))).map(|(ix, iy)| {
                        let (pr, rel, cos) = match cmp.get(ix, iy) {
                            PrEntry::Classical(pt) => (Some(pt.pr_estimate), Some(pt.rel_error), Some(pt.cos_theta3)),
                            PrEntry::OutsideDomain => (None, None, None),
                        };
                        vec![p.x_at(ix).0.to_string(), p.y_at(iy).0.to_string(), fmt_f64(s.get(ix, iy)), opt(pr), opt(rel), opt(cos)]
                    });
                    write_table(&mut w, &h, &["two_x", "two_y", "u", "pr", "rel_error", "cos_theta3"], rows)?;
                }
                Format::Json => {
                    let rows: Vec<Vec<Option<f64>>> = (0..n)
                        .map(|iy| {
                            (0..n)
                                .map(|ix| match cmp.get(ix, iy) {
                                    PrEntry::Classical(pt) => Some(pt.pr_estimate),
                                    PrEntry::OutsideDomain => None,
                                })
                                .collect()
                        })
                        .collect();
                    write_json(&mut w, &PrJson { meta: h.entries.into_iter().collect(), summary: cmp.summary, pr_rows: rows })?;
                }
            }
        }
    }
    w.flush().map_err(|e| Failure::io(path, e))
}

/// `[X, Y]` pairs of a sampled curve; `swap` when samples are in `Y`.
fn pairs(samples: &[f64], values: &[Option<f64>], swap: bool) -> Vec<[f64; 2]> {
    samples
        .iter()
        .zip(values)
        .filter_map(|(&s, v)| v.map(|v| if swap { [v, s] } else { [s, v] }))
        .collect()
}

fn write_curves(w: &mut impl Write, cfg: &RunConfig, curves: &[(&str, Vec<[f64; 2]>)]) -> Result<(), Failure> {
    match cfg.format {
        Format::Json => {
            let mut f = CurveFile::new(&cfg.params);
            for (name, pts) in curves {
                f.add(name, pts.clone());
            }
            f.write(w)?;
        }
        Format::Csv => {
            let mut h = Header::for_params(&cfg.params);
            h.push("coordinates", "shifted: X = x + 1/2, Y = y + 1/2");
            let rows = curves
                .iter()
                .flat_map(|(name, pts)| pts.iter().map(move |[x, y]| vec![name.to_string(), fmt_f64(*x), fmt_f64(*y)]));
            write_table(w, &h, &["curve", "X", "Y"], rows)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FieldJson {
    meta: BTreeMap<String, String>,
    rows: Vec<Vec<Option<f64>>>,
}

#[derive(Serialize)]
struct PrJson {
    meta: BTreeMap<String, String>,
    summary: PrSummary,
    pr_rows: Vec<Vec<Option<f64>>>,
}

fn write_json(w: &mut impl Write, v: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer(&mut *w, v).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(w).map_err(|e| Failure::Usage(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt_f64)
}

fn pbar_name(m: PBar) -> &'static str {
    match m {
        PBar::Arithmetic => "arithmetic",
        PBar::Geometric => "geometric",
    }
}

fn xprime_name(m: XPrime) -> &'static str {
    match m {
        XPrime::ShiftedProduct => "shifted",
        XPrime::Plain => "plain",
    }
}
