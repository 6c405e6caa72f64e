//! Oracle verification over seeded random draws.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use xxchain::dense::max_abs;
use xxchain::oracle::liouvillian::{hamiltonian_for, state_from_vector};
use xxchain::oracle::{
    apply_generator, build_lindblad_set, dissipator_apply_bath, expectation, fock_state,
    gibbs_dense, kernel_report, partial_trace_pair, spectral_lindblad_set, spin_observable, Bath,
    SpinObservable,
};
use xxchain::reduced_density::xstate_from_rep;
use xxchain::spin_rep::{assemble_density_matrix, SpinRepresentation};
use xxchain::steady_state::{steady_factors, SteadyFactors};
use xxchain::transport::flow_report;
use xxchain::{BathSpec, ChainSpec, ModeTable};

use crate::error::CliError;
use crate::fmt_real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub max_n: usize,
    pub draws: usize,
    pub seed: u64,
    /// Perturbs the analytic factors before checking (negative control).
    pub corrupt: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrawParams {
    pub n: usize,
    pub delta: f64,
    pub g: f64,
    pub temp_left: f64,
    pub temp_right: f64,
    pub weight_left: Vec<f64>,
    pub weight_right: Vec<f64>,
}

impl fmt::Display for DrawParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} delta={} g={} temp_left={} temp_right={} weight_left={:?} weight_right={:?}",
            self.n,
            self.delta,
            self.g,
            self.temp_left,
            self.temp_right,
            self.weight_left,
            self.weight_right
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub n: usize,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub runtime: Duration,
    /// Draw with the largest residual, kept for failures.
    pub worst: Option<DrawParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Report without timings; identical for identical options.
    pub fn render(&self) -> String {
        let o = &self.options;
        let mut s = format!(
            "# xxchain {} verify max_n={} draws={} seed={} corrupt={}\ncheck,n,status,max_residual,tolerance\n",
            env!("CARGO_PKG_VERSION"),
            o.max_n,
            o.draws,
            o.seed,
            o.corrupt
        );
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            s += &format!(
                "{},{},{},{},{:e}\n",
                c.name,
                c.n,
                status,
                fmt_real(c.max_residual),
                c.tolerance
            );
            if let (false, Some(w)) = (c.passed, &c.worst) {
                s += &format!("#   worst draw: {w}\n");
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        s += &format!("# {} checks, {} failed\n", self.checks.len(), failed);
        s
    }

    pub fn render_timings(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{} n={}: {:.3}s\n", c.name, c.n, c.runtime.as_secs_f64()))
            .collect()
    }
}

const CHECKS: [(&str, f64); 9] = [
    ("stationarity_fock", 1e-10),
    ("stationarity_spin", 1e-10),
    ("kernel_dimension", 0.5),
    ("kernel_vs_analytic", 1e-9),
    ("positivity_trace", 1e-12),
    ("gibbs_limit", 1e-10),
    ("flows_vs_dissipator", 1e-10),
    ("spin_current", 1e-10),
    ("reduced_states", 1e-9),
];

fn draw_params(rng: &mut impl Rng, n: usize) -> DrawParams {
    let delta = rng.random_range(1.0..=50.0);
    let fraction = rng.random_range(1e-3..=0.99);
    let g = fraction * xxchain::chain::saturation_coupling(n, delta);
    let (temp_left, temp_right) = (rng.random_range(0.0..=20.0), rng.random_range(0.0..=20.0));
    let weight_left = (0..n).map(|_| rng.random_range(0.2..=2.0)).collect();
    let weight_right = (0..n).map(|_| rng.random_range(0.2..=2.0)).collect();
    DrawParams {
        n,
        delta,
        g,
        temp_left,
        temp_right,
        weight_left,
        weight_right,
    }
}

fn corrupt(f: &mut SteadyFactors) {
    let shift = 0.05 * f.lam1[0].max(0.01);
    f.lam1[0] += shift;
    f.lam0[0] -= shift;
}

fn scaled(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Residuals of one draw, in the order of `CHECKS`, with their timings.
fn run_draw(d: &DrawParams, corrupted: bool) -> Result<[(f64, Duration); 9], CliError> {
    let n = d.n;
    let spec = ChainSpec::new(n, d.delta, d.g)?;
    let modes = ModeTable::new(&spec);
    let baths = BathSpec::new(
        d.temp_left,
        d.temp_right,
        d.weight_left.clone(),
        d.weight_right.clone(),
        1.0,
    )?;
    let mut factors = steady_factors(&modes, &baths)?;
    if corrupted {
        corrupt(&mut factors);
    }
    let mut out = [(0.0, Duration::ZERO); 9];
    let mut timed =
        |i: usize, f: &mut dyn FnMut() -> Result<f64, CliError>| -> Result<(), CliError> {
            let t = Instant::now();
            out[i] = (f()?, t.elapsed());
            Ok(())
        };

    let fock_set = build_lindblad_set(&spec, &modes, &baths)?;
    let spin_set = spectral_lindblad_set(&spec, &modes, &baths)?;
    let rho_fock = fock_state(&factors)?;
    let rho = assemble_density_matrix(&modes, &factors)?.to_spin_tensor()?;

    timed(0, &mut || {
        let h = hamiltonian_for(&spec, fock_set.basis)?;
        Ok(max_abs(apply_generator(&h, &fock_set, &rho_fock)?.matrix()))
    })?;
    timed(1, &mut || {
        let h = hamiltonian_for(&spec, spin_set.basis)?;
        Ok(max_abs(apply_generator(&h, &spin_set, &rho)?.matrix()))
    })?;
    let mut kernel = None;
    timed(2, &mut || {
        let report = kernel_report(&spec, &spin_set)?;
        let dim = report.dimension;
        if dim == 1 {
            kernel = Some(state_from_vector(n, spin_set.basis, &report.vectors[0])?);
        }
        Ok((dim as f64 - 1.0).abs())
    })?;
    timed(3, &mut || {
        Ok(match &kernel {
            Some(k) => k.max_abs_diff(&rho)?,
            None => f64::INFINITY,
        })
    })?;
    timed(4, &mut || {
        Ok((rho.trace().re - 1.0)
            .abs()
            .max(-rho.min_eigenvalue())
            .max(0.0))
    })?;
    timed(5, &mut || {
        let t = d.temp_left.max(0.1);
        let eq = baths.with_temperatures(t, t)?;
        let mut f = steady_factors(&modes, &eq)?;
        if corrupted {
            corrupt(&mut f);
        }
        let assembled = assemble_density_matrix(&modes, &f)?.to_spin_tensor()?;
        Ok(assembled.max_abs_diff(&gibbs_dense(&spec, 1.0 / t)?)?)
    })?;
    timed(6, &mut || {
        let report = flow_report(&modes, &baths)?;
        let energy = spin_observable(&spec, SpinObservable::Energy)?;
        let mut worst = 0.0f64;
        for (bath, q, heat) in [
            (Bath::Left, &report.q_left, report.heat_left),
            (Bath::Right, &report.q_right, report.heat_right),
        ] {
            let dr = dissipator_apply_bath(&spin_set, Some(bath), &rho)?;
            worst = worst.max(scaled(expectation(&dr, &energy).re, heat));
            for (k, &qk) in q.iter().enumerate() {
                let sz = spin_observable(&spec, SpinObservable::SigmaZ(k))?;
                worst = worst.max(scaled(expectation(&dr, &sz).re, qk));
            }
        }
        Ok(worst)
    })?;
    timed(7, &mut || {
        let mut worst = 0.0f64;
        for k in 0..n - 1 {
            let j = spin_observable(&spec, SpinObservable::Current(k))?;
            worst = worst.max(expectation(&rho, &j).norm());
        }
        Ok(worst)
    })?;
    timed(8, &mut || {
        let Some(k) = &kernel else {
            return Ok(f64::INFINITY);
        };
        let rep = SpinRepresentation::new(&modes)?;
        let mut worst = 0.0f64;
        for r in 0..n {
            for s in r + 1..n {
                let x = xstate_from_rep(&rep, &factors, r, s)?;
                let m = partial_trace_pair(k, r, s)?;
                let analytic = x.matrix();
                for i in 0..4 {
                    for j in 0..4 {
                        worst = worst.max(
                            (m[(i, j)].re - analytic[(i, j)])
                                .abs()
                                .max(m[(i, j)].im.abs()),
                        );
                    }
                }
            }
        }
        Ok(worst)
    })?;
    Ok(out)
}

pub fn run_verify(options: VerifyOptions) -> Result<VerificationReport, CliError> {
    if !(2..=5).contains(&options.max_n) {
        return Err(CliError::Config(format!(
            "max_n must lie in 2..=5, got {}",
            options.max_n
        )));
    }
    if options.draws == 0 {
        return Err(CliError::Config("draws must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checks = Vec::new();
    for n in 2..=options.max_n {
        let draws: Vec<DrawParams> = (0..options.draws)
            .map(|_| draw_params(&mut rng, n))
            .collect();
        let results: Vec<[(f64, Duration); 9]> = draws
            .par_iter()
            .map(|d| run_draw(d, options.corrupt))
            .collect::<Result<_, _>>()?;
        for (i, &(name, tolerance)) in CHECKS.iter().enumerate() {
            let mut max_residual = 0.0f64;
            let mut worst = None;
            let mut runtime = Duration::ZERO;
            for (d, r) in draws.iter().zip(&results) {
                runtime += r[i].1;
                // NaN residuals count as failures.
                if r[i].0.is_nan() || r[i].0 > max_residual {
                    max_residual = r[i].0;
                    worst = Some(d.clone());
                }
            }
            let passed = max_residual <= tolerance;
            checks.push(CheckResult {
                name,
                n,
                passed,
                max_residual,
                tolerance,
                runtime,
                worst,
            });
        }
    }
    Ok(VerificationReport { options, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_reproducible() {
        let opts = VerifyOptions {
            max_n: 3,
            draws: 4,
            seed: 11,
            corrupt: false,
        };
        let a = run_verify(opts).unwrap();
        assert!(a.passed(), "{}", a.render());
        assert_eq!(a.checks.len(), 2 * CHECKS.len());
        assert_eq!(a.render(), run_verify(opts).unwrap().render());
    }

    #[test]
    fn corrupted_factors_are_caught() {
        let r = run_verify(VerifyOptions {
            max_n: 2,
            draws: 3,
            seed: 5,
            corrupt: true,
        })
        .unwrap();
        assert!(!r.passed());
        let stat = r
            .checks
            .iter()
            .find(|c| c.name == "stationarity_fock")
            .unwrap();
        assert!(!stat.passed && stat.worst.is_some());
        assert!(r.render().contains("worst draw: n=2"));
    }

    #[test]
    fn rejects_large_chains() {
        let r = run_verify(VerifyOptions {
            max_n: 6,
            draws: 1,
            seed: 0,
            corrupt: false,
        });
        assert!(matches!(r, Err(CliError::Config(_))));
    }
}
