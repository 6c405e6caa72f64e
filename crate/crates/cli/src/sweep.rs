//! Parameter sweeps written as CSV.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;
use xxchain::reduced_density::{max_concurrence_over_temp_right, xstate_from_rep, xstate_lazy};
use xxchain::spin_rep::{SpinRepresentation, DEFAULT_DENSE_LIMIT};
use xxchain::steady_state::steady_factors;
use xxchain::transport::flow_report;
use xxchain::ModeTable;

use crate::config::{Point, RawConfig, Setup, SweepVariable};
use crate::error::CliError;
use crate::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// Requested observables; sites and pairs are 0-based here, 1-based in headers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub flows: Vec<usize>,
    pub heat: bool,
    pub concurrence: Vec<(usize, usize)>,
    pub factors: bool,
    pub cmax: Vec<(usize, usize)>,
    pub cmax_bracket: (f64, f64),
    pub cmax_grid: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub setup: Setup,
    pub variable: SweepVariable,
    pub grid: Grid,
    /// Δ of each curve; a single entry when no series is given.
    pub series: Vec<f64>,
    pub outputs: Outputs,
}

fn site(n: usize, k: usize, field: &str) -> Result<usize, CliError> {
    if (1..=n).contains(&k) {
        Ok(k - 1)
    } else {
        Err(CliError::Config(format!(
            "{field}: site {k} outside 1..={n}"
        )))
    }
}

fn pair(n: usize, [r, s]: [usize; 2], field: &str) -> Result<(usize, usize), CliError> {
    let (r, s) = (site(n, r, field)?, site(n, s, field)?);
    if r < s {
        Ok((r, s))
    } else {
        Err(CliError::Config(format!(
            "{field}: pair ({}, {}) needs r < s",
            r + 1,
            s + 1
        )))
    }
}

impl SweepConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let setup = Setup::from_raw(raw)?;
        let n = setup.n_sites;
        let sw = &raw.sweep;
        let missing = |f: &str| CliError::Config(format!("sweep.{f} is required"));
        let variable = sw.variable.ok_or_else(|| missing("variable"))?;
        let grid = Grid {
            start: sw.start.ok_or_else(|| missing("start"))?,
            stop: sw.stop.ok_or_else(|| missing("stop"))?,
            points: sw.points.ok_or_else(|| missing("points"))?,
        };
        if grid.points < 2 {
            return Err(CliError::Config(format!(
                "sweep.points must be >= 2, got {}",
                grid.points
            )));
        }
        if !(grid.start.is_finite() && grid.stop.is_finite()) {
            return Err(CliError::Config(
                "sweep.start and sweep.stop must be finite".into(),
            ));
        }
        let lowest = grid.start.min(grid.stop);
        match variable {
            SweepVariable::TempLeft | SweepVariable::TempRight if lowest < 0.0 => {
                return Err(CliError::Config("temperatures must be >= 0".into()))
            }
            SweepVariable::Delta | SweepVariable::G if lowest <= 0.0 => {
                return Err(CliError::Config(format!(
                    "sweep over {} needs values > 0",
                    variable.name()
                )))
            }
            _ => {}
        }
        let series = raw
            .series
            .delta
            .clone()
            .unwrap_or_else(|| vec![setup.delta]);
        if series.is_empty() || series.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(CliError::Config(
                "series.delta must be a non-empty list of values > 0".into(),
            ));
        }
        if variable == SweepVariable::Delta && raw.series.delta.is_some() {
            return Err(CliError::Config(
                "a delta series cannot be combined with a delta sweep".into(),
            ));
        }
        let o = &raw.outputs;
        let bracket = o.cmax_bracket.unwrap_or([0.0, 50.0]);
        if !(bracket[0] >= 0.0 && bracket[1] > bracket[0]) {
            return Err(CliError::Config(
                "outputs.cmax_bracket needs 0 <= lo < hi".into(),
            ));
        }
        let outputs = Outputs {
            flows: o
                .flows
                .iter()
                .map(|&k| site(n, k, "outputs.flows"))
                .collect::<Result<_, _>>()?,
            heat: o.heat,
            concurrence: o
                .concurrence
                .iter()
                .map(|&p| pair(n, p, "outputs.concurrence"))
                .collect::<Result<_, _>>()?,
            factors: o.factors,
            cmax: o
                .cmax
                .iter()
                .map(|&p| pair(n, p, "outputs.cmax"))
                .collect::<Result<_, _>>()?,
            cmax_bracket: (bracket[0], bracket[1]),
            cmax_grid: o.cmax_grid.unwrap_or(201).max(2),
        };
        if outputs.flows.is_empty()
            && !outputs.heat
            && outputs.concurrence.is_empty()
            && !outputs.factors
            && outputs.cmax.is_empty()
        {
            return Err(CliError::Config("no outputs requested".into()));
        }
        Ok(Self {
            setup,
            variable,
            grid,
            series,
            outputs,
        })
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["index", "delta", "g", "temp_left", "temp_right", "skipped"]
            .map(String::from)
            .to_vec();
        for &k in &self.outputs.flows {
            cols.push(format!("q_left_{}", k + 1));
            cols.push(format!("q_right_{}", k + 1));
        }
        if self.outputs.heat {
            cols.push("heat_left".into());
            cols.push("heat_right".into());
        }
        for &(r, s) in &self.outputs.concurrence {
            cols.push(format!("c_{}_{}", r + 1, s + 1));
        }
        if self.outputs.factors {
            cols.extend((1..=self.setup.n_sites).map(|l| format!("lam1_{l}")));
        }
        cols
    }

    fn point(&self, delta: f64, x: f64) -> Point {
        let s = &self.setup;
        let mut p = Point {
            delta,
            g: s.coupling.resolve(s.n_sites, delta),
            temp_left: s.temp_left,
            temp_right: s.temp_right,
        };
        match self.variable {
            SweepVariable::TempRight => p.temp_right = x,
            SweepVariable::TempLeft => p.temp_left = x,
            SweepVariable::Delta => {
                p.delta = x;
                p.g = s.coupling.resolve(s.n_sites, x);
            }
            SweepVariable::G => p.g = x,
        }
        p
    }

    /// Grid points, curve by curve.
    pub fn points(&self) -> Vec<Point> {
        let xs = self.grid.values();
        self.series
            .iter()
            .flat_map(|&d| xs.iter().map(move |&x| self.point(d, x)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    pub skipped: usize,
}

type ChainKey = (u64, u64);

fn key(p: &Point) -> ChainKey {
    (p.delta.to_bits(), p.g.to_bits())
}

enum Pairs {
    Blocks(SpinRepresentation),
    Lazy,
}

fn evaluate(
    cfg: &SweepConfig,
    p: &Point,
    reps: &HashMap<ChainKey, Pairs>,
) -> Result<Option<Vec<f64>>, CliError> {
    let (spec, baths) = match cfg.setup.build(p) {
        Ok(v) => v,
        Err(CliError::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let modes = ModeTable::new(&spec);
    let mut row = Vec::new();
    let o = &cfg.outputs;
    if !o.flows.is_empty() || o.heat {
        let report = flow_report(&modes, &baths)?;
        for &k in &o.flows {
            row.push(report.q_left[k]);
            row.push(report.q_right[k]);
        }
        if o.heat {
            row.push(report.heat_left);
            row.push(report.heat_right);
        }
    }
    if !o.concurrence.is_empty() || o.factors {
        let f = steady_factors(&modes, &baths)?;
        for &(r, s) in &o.concurrence {
            let x = match reps.get(&key(p)) {
                Some(Pairs::Blocks(rep)) => xstate_from_rep(rep, &f, r, s)?,
                _ => xstate_lazy(&modes, &f, r, s)?,
            };
            row.push(x.concurrence());
        }
        if o.factors {
            row.extend_from_slice(&f.lam1);
        }
    }
    Ok(Some(row))
}

fn representations(
    cfg: &SweepConfig,
    points: &[Point],
) -> Result<HashMap<ChainKey, Pairs>, CliError> {
    let needs = !cfg.outputs.concurrence.is_empty() || !cfg.outputs.cmax.is_empty();
    let mut chains: Vec<Point> = Vec::new();
    if needs {
        for p in points {
            if !chains.iter().any(|q| key(q) == key(p)) {
                chains.push(*p);
            }
        }
    }
    chains
        .par_iter()
        .filter_map(|p| match cfg.setup.build(p) {
            Ok((spec, _)) => Some((key(p), spec)),
            Err(_) => None,
        })
        .map(|(k, spec)| {
            let pairs = if spec.n_sites() <= DEFAULT_DENSE_LIMIT {
                Pairs::Blocks(SpinRepresentation::new(&ModeTable::new(&spec))?)
            } else {
                Pairs::Lazy
            };
            Ok((k, pairs))
        })
        .collect()
}

fn cmax_lines(cfg: &SweepConfig, reps: &HashMap<ChainKey, Pairs>) -> Result<Vec<String>, CliError> {
    let o = &cfg.outputs;
    let mut lines = Vec::new();
    if o.cmax.is_empty() {
        return Ok(lines);
    }
    if matches!(cfg.variable, SweepVariable::Delta | SweepVariable::G) {
        return Err(CliError::Config(
            "cmax needs a fixed chain; sweep over a temperature instead".into(),
        ));
    }
    for &delta in &cfg.series {
        let p = cfg.point(delta, cfg.grid.start);
        let Ok((spec, baths)) = cfg.setup.build(&p) else {
            for &(r, s) in &o.cmax {
                lines.push(format!("cmax({},{}) delta={} skipped", r + 1, s + 1, delta));
            }
            continue;
        };
        let modes = ModeTable::new(&spec);
        let owned;
        let rep = match reps.get(&key(&p)) {
            Some(Pairs::Blocks(rep)) => rep,
            _ => {
                owned = SpinRepresentation::with_limit(&modes, spec.n_sites())?;
                &owned
            }
        };
        for &(r, s) in &o.cmax {
            let m = max_concurrence_over_temp_right(
                rep,
                &modes,
                &baths,
                r,
                s,
                o.cmax_bracket,
                o.cmax_grid,
            )?;
            lines.push(format!(
                "cmax({},{}) delta={} temp_right={} value={}",
                r + 1,
                s + 1,
                delta,
                fmt_real(m.temp_right),
                fmt_real(m.concurrence)
            ));
        }
    }
    Ok(lines)
}

/// Evaluates every grid point (in parallel) and writes rows in grid order.
pub fn run_sweep(cfg: &SweepConfig, out: &mut impl Write) -> Result<SweepSummary, CliError> {
    let points = cfg.points();
    let reps = representations(cfg, &points)?;
    let rows: Vec<Option<Vec<f64>>> = points
        .par_iter()
        .map(|p| evaluate(cfg, p, &reps))
        .collect::<Result<_, _>>()?;
    let cmax = cmax_lines(cfg, &reps)?;

    let mut meta = cfg.setup.metadata();
    meta.push(format!(
        "sweep: variable={} start={} stop={} points={} series_delta={:?}",
        cfg.variable.name(),
        cfg.grid.start,
        cfg.grid.stop,
        cfg.grid.points,
        cfg.series
    ));
    meta.extend(cmax);
    for line in &meta {
        writeln!(out, "# {line}")?;
    }
    let columns = cfg.columns();
    writeln!(out, "{}", columns.join(","))?;
    let width = columns.len() - 6;
    let mut skipped = 0;
    for (i, (p, row)) in points.iter().zip(&rows).enumerate() {
        let head = [p.delta, p.g, p.temp_left, p.temp_right]
            .map(fmt_real)
            .join(",");
        match row {
            Some(values) => {
                let body: Vec<String> = values.iter().map(|&v| fmt_real(v)).collect();
                write!(out, "{i},{head},0")?;
                for v in body {
                    write!(out, ",{v}")?;
                }
            }
            None => {
                skipped += 1;
                write!(out, "{i},{head},1{}", ",".repeat(width))?;
            }
        }
        writeln!(out)?;
    }
    Ok(SweepSummary {
        rows: rows.len(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    fn run(raw: &RawConfig) -> (String, SweepSummary) {
        let cfg = SweepConfig::from_raw(raw).unwrap();
        let mut buf = Vec::new();
        let summary = run_sweep(&cfg, &mut buf).unwrap();
        (String::from_utf8(buf).unwrap(), summary)
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let v = Grid {
            start: 0.0,
            stop: 0.3,
            points: 4,
        }
        .values();
        assert_eq!(v.len(), 4);
        assert_eq!(v[3], 0.3);
        assert_eq!(v[0], 0.0);
    }

    #[test]
    fn skipped_points_are_counted() {
        let raw = RawConfig::parse(
            "[chain]\nn = 4\ndelta = 1.0\n[baths]\ntemp_right = 1.0\n\
             [sweep]\nvariable = \"g\"\nstart = 0.1\nstop = 1.0\npoints = 10\n\
             [outputs]\nheat = true\nconcurrence = [[1, 2]]\n",
            "cfg",
        )
        .unwrap();
        let (text, summary) = run(&raw);
        let data: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .collect();
        assert_eq!(summary.rows, 10);
        assert_eq!(data.len(), 10);
        // bound(4, 1) ≈ 0.618, so g = 0.7..1.0 are infeasible.
        assert_eq!(summary.skipped, 4);
        assert_eq!(
            data.iter()
                .filter(|l| l.split(',').nth(5) == Some("1"))
                .count(),
            4
        );
        let ncols = text
            .lines()
            .find(|l| !l.starts_with('#'))
            .unwrap()
            .split(',')
            .count();
        assert!(data.iter().all(|l| l.split(',').count() == ncols));
    }

    #[test]
    fn output_is_deterministic() {
        let mut raw = preset("fig4").unwrap();
        raw.sweep.points = Some(11);
        let (a, _) = run(&raw);
        let (b, _) = run(&raw);
        assert_eq!(a, b);
    }

    #[test]
    fn columns_follow_outputs() {
        let raw = preset("fig3").unwrap();
        let cfg = SweepConfig::from_raw(&raw).unwrap();
        let cols = cfg.columns();
        assert_eq!(cols[6], "c_1_2");
        assert_eq!(cols.last().unwrap(), "c_1_8");
    }
}
