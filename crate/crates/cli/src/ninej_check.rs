//! `ninej-check`: residuals of the 9j recurrence on random stencils and the
//! `h = 0` reduction to the screen's cross recursion.

use std::time::Instant;

use clap::Args;

use sixj_screen::ninej::{random_stencils, reduction_check, residual_sweep, StencilFilter};
use sixj_screen::Exec;

use crate::failure::Failure;
use crate::report::{Bound, Check, Report, ReportFormat};
use crate::ParamArgs;

#[derive(Args, Debug)]
pub struct NinejArgs {
    /// Largest TwoJ value of any 9j entry.
    #[arg(long, default_value_t = 12)]
    max_two_j: u32,
    /// Pin the entry `h` to this TwoJ value.
    #[arg(long)]
    two_h: Option<u32>,
    /// Number of random stencils.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0x9e37_79b9)]
    seed: u64,
    /// Also compare the h = 0 recurrence with the cross recursion of a screen.
    #[arg(long)]
    reduce: bool,
    /// Screen used by --reduce.
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1e-10)]
    max_residual: f64,
    #[arg(long, default_value_t = 1e-9)]
    max_ratio_deviation: f64,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

pub fn run(a: NinejArgs) -> Result<(), Failure> {
    if a.reduce && a.two_h.is_some_and(|h| h != 0) {
        return Err(Failure::Usage("--reduce needs h = 0".into()));
    }
    if a.count == 0 {
        return Err(Failure::Usage("--count must be positive".into()));
    }
    let params = if a.reduce { Some(a.params.params()?) } else { None };
    let filter = StencilFilter { max_two_j: a.max_two_j, two_h: a.two_h, count: a.count, seed: a.seed };
    let stencils = random_stencils(&filter);
    if stencils.is_empty() {
        return Err(Failure::Usage("no admissible stencils for this filter".into()));
    }

    let exec = Exec::default();
    let mut report = Report::default();
    report.context.insert("max_two_j".into(), a.max_two_j.to_string());
    report.context.insert("two_h".into(), a.two_h.map_or("any".into(), |h| h.to_string()));
    report.context.insert("seed".into(), a.seed.to_string());

    let t = Instant::now();
    let sweep = residual_sweep(&stencils, exec);
    let worst = sweep.worst.map_or(String::new(), |w| format!(", worst at {:?}", w.to_array()));
    let detail = format!("{} of {} requested stencils{worst}", sweep.stencils, a.count);
    report.push_timed(
        vec![Check::new("ninej-residual", sweep.max_relative_residual, Bound::AtMost, a.max_residual, detail)],
        t.elapsed(),
    );

    if let Some(p) = params {
        let t = Instant::now();
        let r = reduction_check(&p, exec);
        let [ta, tb, tc, td] = p.quadruple();
        let detail = format!("screen ({ta},{tb},{tc},{td}): {} stencils, {} skipped", r.stencils, r.skipped);
        report.push_timed(
            vec![Check::new("ninej-reduction", r.max_ratio_deviation, Bound::AtMost, a.max_ratio_deviation, detail)],
            t.elapsed(),
        );
    }
    report.finish(a.report)
}
