//! Single-point reports: modes, steady state, flows, concurrences.

use std::fmt::Write as _;

use xxchain::dense::up_sites;
use xxchain::reduced_density::{max_concurrence_over_temp_right, xstate_from_rep, xstate_lazy};
use xxchain::spin_rep::{assemble_density_matrix, SpinRepresentation, DEFAULT_DENSE_LIMIT};
use xxchain::steady_state::{steady_factors, SteadyFactors};
use xxchain::transport::flow_report;
use xxchain::{BathSpec, ChainSpec, ModeTable};

use crate::config::Setup;
use crate::error::CliError;
use crate::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StateFormat {
    Factors,
    Sectors,
    Dense,
}

fn header(setup: &Setup, spec: &ChainSpec) -> String {
    let mut s = String::new();
    for line in setup.metadata() {
        writeln!(s, "# {line}").unwrap();
    }
    writeln!(
        s,
        "# resolved: g={} bound={}",
        fmt_real(spec.g()),
        fmt_real(spec.coupling_bound())
    )
    .unwrap();
    s
}

fn point(setup: &Setup) -> Result<(ChainSpec, ModeTable, BathSpec), CliError> {
    let (spec, baths) = setup.build(&setup.base_point())?;
    let modes = ModeTable::new(&spec);
    Ok((spec, modes, baths))
}

pub fn modes_report(setup: &Setup) -> Result<String, CliError> {
    // Frequencies are meaningful even past the bound, so build the chain directly.
    let p = setup.base_point();
    let spec = ChainSpec::new(setup.n_sites, p.delta, p.g).map_err(CliError::infeasible)?;
    let modes = ModeTable::new(&spec);
    let n = spec.n_sites();
    let mut s = header(setup, &spec);
    writeln!(
        s,
        "# frequency assumption holds: {}",
        spec.check_frequency_assumption()
    )
    .unwrap();
    writeln!(s, "mode,omega,u_1,u_{n}").unwrap();
    for l in 0..n {
        let cols = [modes.omega()[l], modes.u(l, 0), modes.u(l, n - 1)].map(fmt_real);
        writeln!(s, "{},{}", l + 1, cols.join(",")).unwrap();
    }
    Ok(s)
}

/// Trace of ρ∞ restricted to each weight sector: elementary symmetric sums of the factors.
pub fn sector_traces(f: &SteadyFactors) -> Vec<f64> {
    let mut poly = vec![1.0];
    for l in 0..f.n_modes() {
        let mut next = vec![0.0; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j] += c * f.lam0[l];
            next[j + 1] += c * f.lam1[l];
        }
        poly = next;
    }
    poly
}

pub fn print_state(setup: &Setup, format: StateFormat) -> Result<String, CliError> {
    let (spec, modes, baths) = point(setup)?;
    let f = steady_factors(&modes, &baths)?;
    let n = spec.n_sites();
    let mut s = header(setup, &spec);
    match format {
        StateFormat::Factors => {
            writeln!(s, "mode,omega,lam0,lam1").unwrap();
            for l in 0..n {
                let cols = [modes.omega()[l], f.lam0[l], f.lam1[l]].map(fmt_real);
                writeln!(s, "{},{}", l + 1, cols.join(",")).unwrap();
            }
        }
        StateFormat::Sectors => {
            writeln!(s, "p,dimension,trace").unwrap();
            for (p, t) in sector_traces(&f).iter().enumerate() {
                let dim = xxchain::combinadics::sector_size(n, p);
                writeln!(s, "{p},{dim},{}", fmt_real(*t)).unwrap();
            }
        }
        StateFormat::Dense => {
            if n > DEFAULT_DENSE_LIMIT {
                return Err(CliError::Config(format!(
                    "dense output is limited to N <= {DEFAULT_DENSE_LIMIT}, got {n}"
                )));
            }
            let rho = assemble_density_matrix(&modes, &f)?.to_spin_tensor()?;
            let m = rho.matrix();
            let label = |t: usize| -> String {
                let up = up_sites(n, t);
                (0..n)
                    .map(|k| if up.is_occupied(k) { 'u' } else { 'd' })
                    .collect()
            };
            writeln!(
                s,
                "# spin tensor basis, site 1 most significant, u before d"
            )
            .unwrap();
            writeln!(
                s,
                "# rows/columns: {}",
                (0..m.nrows()).map(label).collect::<Vec<_>>().join(" ")
            )
            .unwrap();
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| fmt_real(m[(i, j)].re)).collect();
                writeln!(s, "{}", row.join(",")).unwrap();
            }
        }
    }
    Ok(s)
}

pub fn flows_report(setup: &Setup) -> Result<String, CliError> {
    let (spec, modes, baths) = point(setup)?;
    let r = flow_report(&modes, &baths)?;
    let mut s = header(setup, &spec);
    writeln!(s, "observable,site,value").unwrap();
    for k in 0..spec.n_sites() {
        writeln!(s, "q_left,{},{}", k + 1, fmt_real(r.q_left[k])).unwrap();
        writeln!(s, "q_right,{},{}", k + 1, fmt_real(r.q_right[k])).unwrap();
    }
    writeln!(s, "heat_left,,{}", fmt_real(r.heat_left)).unwrap();
    writeln!(s, "heat_right,,{}", fmt_real(r.heat_right)).unwrap();
    Ok(s)
}

/// Pairs are 0-based; an empty list means every pair.
pub fn concurrence_report(
    setup: &Setup,
    pairs: &[(usize, usize)],
    maximize: Option<((f64, f64), usize)>,
) -> Result<String, CliError> {
    let (spec, modes, baths) = point(setup)?;
    let n = spec.n_sites();
    let all: Vec<(usize, usize)> = (0..n)
        .flat_map(|r| (r + 1..n).map(move |s| (r, s)))
        .collect();
    let pairs = if pairs.is_empty() { &all[..] } else { pairs };
    for &(r, s) in pairs {
        if !(r < s && s < n) {
            return Err(CliError::Config(format!(
                "pair ({}, {}) invalid for N = {n}",
                r + 1,
                s + 1
            )));
        }
    }
    let rep = if n <= DEFAULT_DENSE_LIMIT || maximize.is_some() {
        Some(SpinRepresentation::with_limit(
            &modes,
            n.max(DEFAULT_DENSE_LIMIT),
        )?)
    } else {
        None
    };
    let mut out = header(setup, &spec);
    match maximize {
        None => {
            let f = steady_factors(&modes, &baths)?;
            writeln!(out, "r,s,a,b,c,d,e,concurrence").unwrap();
            for &(r, s) in pairs {
                let x = match &rep {
                    Some(rep) => xstate_from_rep(rep, &f, r, s)?,
                    None => xstate_lazy(&modes, &f, r, s)?,
                };
                let cols = [x.a, x.b, x.c, x.d, x.e, x.concurrence()].map(fmt_real);
                writeln!(out, "{},{},{}", r + 1, s + 1, cols.join(",")).unwrap();
            }
        }
        Some((bracket, grid)) => {
            let rep = rep.expect("built above");
            writeln!(
                out,
                "# maximized over temp_right in [{}, {}]",
                bracket.0, bracket.1
            )
            .unwrap();
            writeln!(out, "r,s,temp_right,cmax").unwrap();
            for &(r, s) in pairs {
                let m = max_concurrence_over_temp_right(&rep, &modes, &baths, r, s, bracket, grid)?;
                writeln!(
                    out,
                    "{},{},{},{}",
                    r + 1,
                    s + 1,
                    fmt_real(m.temp_right),
                    fmt_real(m.concurrence)
                )
                .unwrap();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;
    use xxchain::chain::{eigen_energy, FockString};

    fn setup(text: &str) -> Setup {
        Setup::from_raw(&RawConfig::parse(text, "test").unwrap()).unwrap()
    }

    #[test]
    fn zero_temperature_two_sites() {
        let s = setup("[chain]\nn = 2\ndelta = 1.0\ng = 0.3\n");
        let text = print_state(&s, StateFormat::Factors).unwrap();
        let rows: Vec<&str> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .collect();
        for row in rows {
            let cols: Vec<f64> = row.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[1], 1.0);
            assert_eq!(cols[2], 0.0);
        }
    }

    #[test]
    fn sector_traces_match_gibbs_partition_sums() {
        let s = setup(
            "[chain]\nn = 3\ndelta = 1.0\ng = 0.4\n[baths]\ntemp_left = 0.8\ntemp_right = 0.8\n",
        );
        let (spec, modes, baths) = point(&s).unwrap();
        let traces = sector_traces(&steady_factors(&modes, &baths).unwrap());
        let beta = 1.0 / 0.8;
        let mut sums = [0.0; 4];
        for f in FockString::all(3) {
            sums[f.weight()] += (-beta * eigen_energy(&spec, &f).unwrap()).exp();
        }
        let z: f64 = sums.iter().sum();
        for p in 0..4 {
            assert!((traces[p] - sums[p] / z).abs() < 1e-14);
        }
    }

    #[test]
    fn dense_accepts_eight_sites() {
        let s = setup("[chain]\nn = 8\ndelta = 2.0\nfraction = 0.5\n[baths]\ntemp_right = 1.0\n");
        let text = print_state(&s, StateFormat::Dense).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 256);
        let s = setup("[chain]\nn = 13\ndelta = 2.0\n");
        assert!(print_state(&s, StateFormat::Dense).is_err());
    }
}
