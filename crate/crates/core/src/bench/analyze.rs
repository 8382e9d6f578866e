use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gen::{Manifest, MANIFEST};
use super::ledger::{LogLine, RunLedger};
use super::solve::CostModel;
use super::{read_json, write_json};
use crate::hash::derive_u64;
use crate::metrics::{
    scaling_fit, tts_curve, FirstPassageEmpirical, ScalingFit, ScalingPoint, TtsCurve, WindowPolicy, DEFAULT_RESAMPLES,
};
use crate::solvers::SolverId;
use crate::{Error, Result};

/// Points of an automatic grid.
pub const AUTO_GRID_POINTS: usize = 20;

/// Smallest 1σ error, in decades, given to a fit point.
pub const MIN_LOG_SIGMA: f64 = 1e-6;

/// Runtime grid: `log:a:b:k`, `lin:a:b:k`, `list:v1,v2,...` or `auto[:k]`.
/// `auto` spans the observed first passages of a size up to the smallest
/// cutoff, log-uniformly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GridSpec {
    Log { lo: f64, hi: f64, k: usize },
    Lin { lo: f64, hi: f64, k: usize },
    List(Vec<f64>),
    Auto { k: usize },
}

fn spaced(lo: f64, hi: f64, k: usize, log: bool) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    (0..k)
        .map(|i| {
            let f = i as f64 / (k - 1) as f64;
            if i == k - 1 {
                hi
            } else if log {
                (lo.ln() + f * (hi.ln() - lo.ln())).exp()
            } else {
                lo + f * (hi - lo)
            }
        })
        .collect()
}

impl GridSpec {
    /// Grid for data whose passages start at `first` and whose runs are all
    /// informative up to `last`; only `Auto` uses them.
    pub fn points(&self, first: f64, last: f64) -> Vec<f64> {
        match self {
            GridSpec::Log { lo, hi, k } => spaced(*lo, *hi, *k, true),
            GridSpec::Lin { lo, hi, k } => spaced(*lo, *hi, *k, false),
            GridSpec::List(v) => v.clone(),
            GridSpec::Auto { k } => {
                if !(first < last) {
                    return vec![last];
                }
                let mut v = spaced(first.max(1.0).min(last), last, *k, true);
                v.dedup();
                v
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad grid spec '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let spec = match parts.as_slice() {
            ["auto"] => GridSpec::Auto { k: AUTO_GRID_POINTS },
            ["auto", k] => GridSpec::Auto {
                k: k.parse().map_err(|_| bad())?,
            },
            ["log", a, b, k] | ["lin", a, b, k] => {
                let (lo, hi, k) = (num(a)?, num(b)?, k.parse::<usize>().map_err(|_| bad())?);
                if parts[0] == "log" {
                    if !(lo > 0.0) {
                        return Err(bad());
                    }
                    GridSpec::Log { lo, hi, k }
                } else {
                    GridSpec::Lin { lo, hi, k }
                }
            }
            ["list", vals] => GridSpec::List(vals.split(',').map(num).collect::<Result<_>>()?),
            _ => return Err(bad()),
        };
        match &spec {
            GridSpec::Log { lo, hi, k } | GridSpec::Lin { lo, hi, k } => {
                if *k == 0 || !(lo.is_finite() && hi.is_finite() && lo < hi) || *lo <= 0.0 {
                    return Err(bad());
                }
            }
            GridSpec::List(v) => {
                if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) || v.windows(2).any(|w| w[0] >= w[1])
                {
                    return Err(bad());
                }
            }
            GridSpec::Auto { k } => {
                if *k == 0 {
                    return Err(bad());
                }
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Log { lo, hi, k } => write!(f, "log:{lo}:{hi}:{k}"),
            GridSpec::Lin { lo, hi, k } => write!(f, "lin:{lo}:{hi}:{k}"),
            GridSpec::List(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "list:{}", s.join(","))
            }
            GridSpec::Auto { k } => write!(f, "auto:{k}"),
        }
    }
}

impl TryFrom<String> for GridSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

/// Parallelization factor as a function of size: `K`, `K/n` or `floor(K/n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FpExpr {
    Const(f64),
    Ratio(f64),
    FloorRatio(f64),
}

impl FpExpr {
    pub fn eval(&self, n: usize) -> Result<f64> {
        let v = match self {
            FpExpr::Const(k) => *k,
            FpExpr::Ratio(k) => k / n as f64,
            FpExpr::FloorRatio(k) => (k / n as f64).floor(),
        };
        if !(v >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "f_p = {v} < 1 at n = {n} for '{self}'"
            )));
        }
        Ok(v)
    }
}

impl FromStr for FpExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad f_p expression '{s}'"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite())
                .ok_or_else(bad)
        };
        if let Some(inner) = t.strip_prefix("floor(").and_then(|r| r.strip_suffix(')')) {
            let k = inner.strip_suffix("/n").ok_or_else(bad)?;
            return Ok(FpExpr::FloorRatio(num(k)?));
        }
        if let Some(k) = t.strip_suffix("/n") {
            return Ok(FpExpr::Ratio(num(k)?));
        }
        Ok(FpExpr::Const(num(&t)?))
    }
}

impl fmt::Display for FpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FpExpr::Const(k) => write!(f, "{k}"),
            FpExpr::Ratio(k) => write!(f, "{k}/n"),
            FpExpr::FloorRatio(k) => write!(f, "floor({k}/n)"),
        }
    }
}

impl TryFrom<String> for FpExpr {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FpExpr> for String {
    fn from(e: FpExpr) -> String {
        e.to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    /// Native solver steps.
    #[default]
    Steps,
    /// Seconds from the measured cost per step.
    Seconds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub quantiles: Vec<f64>,
    pub fp: FpExpr,
    pub grid: GridSpec,
    pub resamples: usize,
    pub seed: u64,
    pub window: WindowPolicy,
    pub units: TimeUnit,
    /// Fit optima that sit on a grid endpoint as well.
    pub include_boundary: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            quantiles: vec![0.25, 0.5, 0.75],
            fp: FpExpr::Const(1.0),
            grid: GridSpec::Auto { k: AUTO_GRID_POINTS },
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
            window: WindowPolicy::Auto,
            units: TimeUnit::Steps,
            include_boundary: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub solver_id: SolverId,
    pub params_hash: String,
    pub size: Option<usize>,
    pub quantile: Option<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub solver_id: SolverId,
    pub params_hash: String,
    pub curves: Vec<TtsCurve>,
    pub fits: Vec<ScalingFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub options: AnalysisOptions,
    pub series: Vec<SeriesReport>,
    pub gaps: Vec<Gap>,
}

impl SeriesReport {
    /// Fit points of quantile `q`: finite optima, in decades.
    pub fn points(&self, q: f64, include_boundary: bool) -> Vec<ScalingPoint> {
        self.curves
            .iter()
            .filter(|c| c.quantile == q)
            .filter_map(|c| {
                let o = c.opt?;
                if (o.boundary_flag && !include_boundary) || !(o.tts.is_finite() && o.tts > 0.0) {
                    return None;
                }
                Some(ScalingPoint {
                    n: c.size as f64,
                    log10_tts: o.tts.log10(),
                    sigma: (o.sigma / (o.tts * std::f64::consts::LN_10)).max(MIN_LOG_SIGMA),
                })
            })
            .collect()
    }
}

/// Passage and censoring times of one instance.
type Passages = (Vec<f64>, Vec<f64>);

type Grouped = BTreeMap<(SolverId, String), BTreeMap<usize, Vec<FirstPassageEmpirical>>>;

fn group(lines: &[&LogLine], size_of: &BTreeMap<String, usize>, units: TimeUnit, cost: &CostModel) -> Result<Grouped> {
    let mut by: BTreeMap<(SolverId, String, usize, String), Passages> = BTreeMap::new();
    for l in lines {
        let n = *size_of
            .get(&l.instance_id)
            .ok_or_else(|| Error::InsufficientData(format!("instance {} has no known size", l.instance_id)))?;
        let scale = match units {
            TimeUnit::Steps => 1.0,
            TimeUnit::Seconds => {
                cost.ns_per_step(l.solver_id.as_str(), &l.params_hash, n)
                    .ok_or_else(|| Error::InsufficientData(format!("no cost model for {} n={n}", l.solver_id)))?
                    * 1e-9
            }
        };
        let slot = by
            .entry((l.solver_id, l.params_hash.clone(), n, l.instance_id.clone()))
            .or_default();
        match (l.success, l.steps) {
            (true, Some(s)) => slot.0.push(s as f64 * scale),
            _ => slot.1.push(l.cutoff as f64 * scale),
        }
    }
    let mut out: Grouped = BTreeMap::new();
    for ((sid, hash, n, id), (p, c)) in by {
        out.entry((sid, hash))
            .or_default()
            .entry(n)
            .or_default()
            .push(FirstPassageEmpirical::new(id, p, c)?);
    }
    Ok(out)
}

fn grid_bounds(instances: &[FirstPassageEmpirical]) -> (f64, f64) {
    let first = instances
        .iter()
        .filter_map(|i| i.passages.first().copied())
        .fold(f64::INFINITY, f64::min);
    let last = instances
        .iter()
        .map(|i| {
            i.min_cutoff()
                .unwrap_or_else(|| i.passages.last().copied().unwrap_or(0.0))
        })
        .fold(f64::INFINITY, f64::min);
    (first, last)
}

/// Curves and fits for completed log lines; insufficient data becomes a gap.
pub fn analyze_lines(
    lines: &[&LogLine],
    size_of: &BTreeMap<String, usize>,
    cost: &CostModel,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport> {
    if opts.quantiles.is_empty() || opts.quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
        return Err(Error::InvalidParameter("quantiles must lie in (0, 1)".into()));
    }
    let grouped = group(lines, size_of, opts.units, cost)?;
    let mut series = Vec::new();
    let mut gaps = Vec::new();
    for ((sid, hash), sizes) in &grouped {
        let mut rep = SeriesReport {
            solver_id: *sid,
            params_hash: hash.clone(),
            curves: Vec::new(),
            fits: Vec::new(),
        };
        let gap = |size, quantile, reason: String| Gap {
            solver_id: *sid,
            params_hash: hash.clone(),
            size,
            quantile,
            reason,
        };
        for (&n, inst) in sizes {
            let (first, last) = grid_bounds(inst);
            let grid = opts.grid.points(first, last);
            let f_p = match opts.fp.eval(n) {
                Ok(v) => v,
                Err(e) => {
                    gaps.push(gap(Some(n), None, e.to_string()));
                    continue;
                }
            };
            for &q in &opts.quantiles {
                let seed = derive_u64(&[
                    &opts.seed.to_string(),
                    sid.as_str(),
                    hash,
                    &n.to_string(),
                    &q.to_string(),
                ]);
                match tts_curve(inst, &grid, n, q, f_p, opts.resamples, seed) {
                    Ok(c) => {
                        match c.opt {
                            None => gaps.push(gap(Some(n), Some(q), "too few finite TTS points for an optimum".into())),
                            Some(o) if o.boundary_flag => gaps.push(gap(
                                Some(n),
                                Some(q),
                                format!("optimum at grid boundary t_f = {}", o.t_f),
                            )),
                            _ => {}
                        }
                        rep.curves.push(c);
                    }
                    Err(e) => gaps.push(gap(Some(n), Some(q), e.to_string())),
                }
            }
        }
        for &q in &opts.quantiles {
            let pts = rep.points(q, opts.include_boundary);
            match scaling_fit(&pts, opts.window) {
                Ok(mut f) => {
                    f.quantile = Some(q);
                    rep.fits.push(f);
                }
                Err(e) => gaps.push(gap(None, Some(q), format!("no scaling fit: {e}"))),
            }
        }
        series.push(rep);
    }
    Ok(AnalysisReport {
        options: opts.clone(),
        series,
        gaps,
    })
}

fn size_index(run_dir: &Path) -> Result<BTreeMap<String, usize>> {
    let idx = run_dir.join("instance_index.json");
    if idx.exists() {
        return read_json(&idx);
    }
    let inst = run_dir.join("instances");
    if inst.join(MANIFEST).exists() {
        let m = Manifest::read(&inst)?;
        return Ok(m.entries.into_iter().map(|e| (e.instance_id, e.n)).collect());
    }
    Err(Error::data(&idx, "no instance index or manifest in run directory"))
}

/// Analyses the ledgered logs of `run_dir`, writing `analysis.json` and the
/// CSV tables to `out`.
pub fn cmd_analyze(run_dir: &Path, opts: &AnalysisOptions, out: &Path) -> Result<AnalysisReport> {
    let ledger = RunLedger::rebuild(&run_dir.join("logs"), false)?;
    if ledger.is_empty() {
        return Err(Error::data(run_dir.join("logs"), "no completed runs"));
    }
    let lines: Vec<&LogLine> = ledger.lines().collect();
    let cost = CostModel::read(run_dir)?;
    let report = analyze_lines(&lines, &size_index(run_dir)?, &cost, opts)?;
    write_json(&out.join("analysis.json"), &report)?;
    super::export::write_csv(&report, out)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(
            "log:1:100:3".parse::<GridSpec>().unwrap().points(0.0, 0.0),
            vec![1.0, 10.000000000000002, 100.0]
        );
        assert_eq!(
            "lin:2:6:3".parse::<GridSpec>().unwrap().points(0.0, 0.0),
            vec![2.0, 4.0, 6.0]
        );
        assert_eq!(
            "list:1,5,9".parse::<GridSpec>().unwrap(),
            GridSpec::List(vec![1.0, 5.0, 9.0])
        );
        assert_eq!(
            "auto".parse::<GridSpec>().unwrap(),
            GridSpec::Auto { k: AUTO_GRID_POINTS }
        );
        let a = GridSpec::Auto { k: 3 }.points(4.0, 400.0);
        assert_eq!(a.len(), 3);
        assert!((a[1] - 40.0).abs() < 1e-9);
        for bad in [
            "log:0:10:3",
            "lin:5:1:3",
            "list:3,2",
            "list:",
            "grid",
            "log:1:10",
            "auto:0",
        ] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
        for s in ["log:1:100:3", "lin:2:6:3", "list:1,5,9", "auto:7"] {
            assert_eq!(s.parse::<GridSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn fp_expressions() {
        assert_eq!("8".parse::<FpExpr>().unwrap().eval(32).unwrap(), 8.0);
        assert_eq!("5000/n".parse::<FpExpr>().unwrap().eval(64).unwrap(), 78.125);
        assert_eq!("floor(5000/n)".parse::<FpExpr>().unwrap().eval(64).unwrap(), 78.0);
        assert_eq!(
            " floor( 5000 / n ) ".parse::<FpExpr>().unwrap(),
            FpExpr::FloorRatio(5000.0)
        );
        assert!("100/n".parse::<FpExpr>().unwrap().eval(128).is_err());
        for bad in ["", "0", "n/4", "floor(5)", "-2", "x"] {
            assert!(bad.parse::<FpExpr>().is_err(), "{bad}");
        }
    }
}
