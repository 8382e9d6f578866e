use std::fmt::Write as _;
use std::path::Path;

use super::analyze::AnalysisReport;
use super::{read_json, write_atomic};
use crate::{Error, Result};

/// Shortest round-trip decimal; `+∞` as `inf`.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v > 0.0 {
        "inf".into()
    } else if v < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// `curves.csv` (one row per grid point), `optima.csv` (one row per size and
/// quantile, `log10` TTS against `n`) and `fits.csv`.
pub fn write_csv(report: &AnalysisReport, out: &Path) -> Result<()> {
    let mut curves =
        String::from("solver_id,params_hash,size,quantile,f_p,t_f,tts_mean,tts_sigma,is_opt,boundary_flag\n");
    let mut optima = String::from(
        "solver_id,params_hash,quantile,size,f_p,opt_t_f,opt_tts,opt_sigma,log10_tts,log10_sigma,boundary_flag\n",
    );
    let mut fits = String::from("solver_id,params_hash,quantile,alpha,alpha_2sigma,beta,beta_2sigma,window,chi2\n");
    for s in &report.series {
        for c in &s.curves {
            for p in &c.grid {
                let is_opt = c.opt.is_some_and(|o| o.t_f == p.t_f);
                let _ = writeln!(
                    curves,
                    "{},{},{},{},{},{},{},{},{},{}",
                    s.solver_id,
                    s.params_hash,
                    c.size,
                    num(c.quantile),
                    num(c.f_p),
                    num(p.t_f),
                    num(p.tts_mean),
                    num(p.tts_sigma),
                    is_opt,
                    is_opt && c.opt.is_some_and(|o| o.boundary_flag)
                );
            }
            if let Some(o) = c.opt {
                let _ = writeln!(
                    optima,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    s.solver_id,
                    s.params_hash,
                    num(c.quantile),
                    c.size,
                    num(c.f_p),
                    num(o.t_f),
                    num(o.tts),
                    num(o.sigma),
                    num(o.tts.log10()),
                    num(o.sigma / (o.tts * std::f64::consts::LN_10)),
                    o.boundary_flag
                );
            }
        }
        for f in &s.fits {
            let window: Vec<String> = f.window.iter().map(|n| num(*n)).collect();
            let _ = writeln!(
                fits,
                "{},{},{},{},{},{},{},{},{}",
                s.solver_id,
                s.params_hash,
                f.quantile.map(num).unwrap_or_default(),
                num(f.alpha),
                num(f.alpha_2sigma),
                num(f.beta),
                num(f.beta_2sigma),
                window.join(";"),
                num(f.chi2)
            );
        }
    }
    write_atomic(&out.join("curves.csv"), curves.as_bytes())?;
    write_atomic(&out.join("optima.csv"), optima.as_bytes())?;
    write_atomic(&out.join("fits.csv"), fits.as_bytes())
}

/// Re-exports `analysis.json` in `dir` as CSV tables next to it.
pub fn cmd_export(dir: &Path, format: &str) -> Result<()> {
    if format != "csv" {
        return Err(Error::InvalidParameter(format!("unsupported export format '{format}'")));
    }
    let report: AnalysisReport = read_json(&dir.join("analysis.json"))?;
    write_csv(&report, dir)
}
