//! Two-spin reduced states of the stationary state.
//!
//! In the order (↑↑, ↑↓, ↓↑, ↓↓) the reduced state of sites r < s is
//!
//! ```text
//! | a 0 0 0 |
//! | 0 b c 0 |
//! | 0 c d 0 |
//! | 0 0 0 e |
//! ```
//!
//! Diagonal entries sum S^(p) diagonal entries over the spin configurations
//! with the prescribed (r, s) occupations. The coherence c pairs each
//! configuration (↑_r ↓_s, x) with (↓_r ↑_s, x) for the same pattern x on the
//! traced-out sites, which is the k-th/k-th pairing of aligned index families.

use nalgebra::Matrix4;

use crate::chain::{FockString, ModeTable};
use crate::combinadics::{index_family, CombinadicIndex, IndexFamily};
use crate::error::{Error, Result};
use crate::spin_rep::{
    s_entry_from_strings, sector_eigenvalues, MinorCache, SpinRepresentation, DEFAULT_DENSE_LIMIT,
};
use crate::steady_state::{occupations, steady_factors, BathSpec, SteadyFactors};

/// X-state entries for sites `r < s` (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateCoeffs {
    pub r: usize,
    pub s: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl XStateCoeffs {
    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::from_diagonal(&[self.a, self.b, self.d, self.e].into());
        m[(1, 2)] = self.c;
        m[(2, 1)] = self.c;
        m
    }

    pub fn trace(&self) -> f64 {
        self.a + self.b + self.d + self.e
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(self)
    }
}

/// 2 max(0, |c| − √(a e)).
pub fn concurrence(x: &XStateCoeffs) -> f64 {
    2.0 * (x.c.abs() - (x.a * x.e).max(0.0).sqrt()).max(0.0)
}

fn check_pair(n: usize, r: usize, s: usize) -> Result<()> {
    if r < s && s < n {
        Ok(())
    } else {
        Err(Error::InvalidPair {
            r: r + 1,
            s: s + 1,
            n_sites: n,
        })
    }
}

type Member = (FockString, CombinadicIndex);

struct Families {
    up_up: IndexFamily,
    up_down: IndexFamily,
    down_up: IndexFamily,
    down_down: IndexFamily,
}

fn families(n: usize, p: usize, r: usize, s: usize) -> Result<Families> {
    Ok(Families {
        up_up: index_family(n, p, r, s, true, true)?,
        up_down: index_family(n, p, r, s, true, false)?,
        down_up: index_family(n, p, r, s, false, true)?,
        down_down: index_family(n, p, r, s, false, false)?,
    })
}

fn accumulate(
    n: usize,
    r: usize,
    s: usize,
    mut diag: impl FnMut(&Member) -> f64,
    mut coherence: impl FnMut(&Member, &Member) -> f64,
) -> Result<XStateCoeffs> {
    let mut x = XStateCoeffs {
        r,
        s,
        a: 0.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
        e: 0.0,
    };
    for p in 0..=n {
        let f = families(n, p, r, s)?;
        x.a += f.up_up.members.iter().map(&mut diag).sum::<f64>();
        x.b += f.up_down.members.iter().map(&mut diag).sum::<f64>();
        x.d += f.down_up.members.iter().map(&mut diag).sum::<f64>();
        x.e += f.down_down.members.iter().map(&mut diag).sum::<f64>();
        debug_assert_eq!(f.up_down.len(), f.down_up.len());
        x.c += f
            .up_down
            .members
            .iter()
            .zip(&f.down_up.members)
            .map(|(u, v)| coherence(u, v))
            .sum::<f64>();
    }
    Ok(x)
}

/// Coefficients from precomputed D blocks.
pub fn xstate_from_rep(
    rep: &SpinRepresentation,
    factors: &SteadyFactors,
    r: usize,
    s: usize,
) -> Result<XStateCoeffs> {
    let n = rep.n_sites();
    check_pair(n, r, s)?;
    let lambdas: Vec<Vec<f64>> = (0..=n).map(|p| sector_eigenvalues(factors, p)).collect();
    let pos = |m: &Member| (m.1.weight, m.1.rank as usize - 1);
    accumulate(
        n,
        r,
        s,
        |m| {
            let (p, i) = pos(m);
            rep.s_entry(&lambdas[p], p, i, i)
        },
        |u, v| {
            let (p, i) = pos(u);
            let (_, j) = pos(v);
            rep.s_entry(&lambdas[p], p, i, j)
        },
    )
}

/// Coefficients from memoized minors, without any block in memory.
pub fn xstate_lazy(
    modes: &ModeTable,
    factors: &SteadyFactors,
    r: usize,
    s: usize,
) -> Result<XStateCoeffs> {
    let n = modes.n_sites();
    check_pair(n, r, s)?;
    let cache = std::cell::RefCell::new(MinorCache::new(modes));
    accumulate(
        n,
        r,
        s,
        |m| s_entry_from_strings(&mut cache.borrow_mut(), factors, m.0, m.0),
        |u, v| s_entry_from_strings(&mut cache.borrow_mut(), factors, u.0, v.0),
    )
}

/// Materializes D blocks up to N = 12 and falls back to lazy minors above.
pub fn xstate_coeffs(
    modes: &ModeTable,
    factors: &SteadyFactors,
    r: usize,
    s: usize,
) -> Result<XStateCoeffs> {
    if modes.n_sites() <= DEFAULT_DENSE_LIMIT {
        xstate_from_rep(&SpinRepresentation::new(modes)?, factors, r, s)
    } else {
        xstate_lazy(modes, factors, r, s)
    }
}

/// Closed-form coherence of the three-site chain with h_L = h_R.
pub fn simplified_c_3spin(modes: &ModeTable, baths: &BathSpec, r: usize, s: usize) -> Result<f64> {
    if modes.n_sites() != 3 {
        return Err(Error::SizeLimit {
            what: "the three-site closed form",
            n_sites: modes.n_sites(),
            limit: 3,
        });
    }
    check_pair(3, r, s)?;
    if baths.weight_left != baths.weight_right {
        return Err(Error::InvalidBath(
            "the three-site closed form needs h_L = h_R".into(),
        ));
    }
    let (nl, nr) = occupations(modes, baths)?;
    let big: Vec<f64> = nl.iter().zip(&nr).map(|(a, b)| a + b).collect();
    let (n1, n2, n3) = (big[0], big[1], big[2]);
    Ok(if (r, s) == (0, 2) {
        (n1 + n3 - 2.0 * n2) / (8.0 * (1.0 + n1) * (1.0 + n2) * (1.0 + n3))
    } else {
        (n1 - n3) / (4.0 * 2f64.sqrt() * (1.0 + n1) * (1.0 + n3))
    })
}

/// Location and value of the largest C(r, s) over T_R in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceMax {
    pub temp_right: f64,
    pub concurrence: f64,
}

/// Scans `grid` points of T_R, then refines the best bracket by golden section.
pub fn max_concurrence_over_temp_right(
    rep: &SpinRepresentation,
    modes: &ModeTable,
    baths: &BathSpec,
    r: usize,
    s: usize,
    (lo, hi): (f64, f64),
    grid: usize,
) -> Result<ConcurrenceMax> {
    if !(lo >= 0.0 && hi > lo && grid >= 2) {
        return Err(Error::InvalidBath(format!(
            "need 0 <= lo < hi and at least two grid points, got [{lo}, {hi}] with {grid}"
        )));
    }
    let eval = |t: f64| -> Result<f64> {
        let f = steady_factors(modes, &baths.with_temperatures(baths.temp_left, t)?)?;
        Ok(xstate_from_rep(rep, &f, r, s)?.concurrence())
    };
    let step = (hi - lo) / (grid - 1) as f64;
    let temps: Vec<f64> = (0..grid)
        .map(|i| {
            if i + 1 == grid {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect();
    let values = temps.iter().map(|&t| eval(t)).collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > values[b] { i } else { b });
    if values[best] == 0.0 {
        return Ok(ConcurrenceMax {
            temp_right: temps[best],
            concurrence: 0.0,
        });
    }
    let mut a = temps[best.saturating_sub(1)];
    let mut b = temps[(best + 1).min(grid - 1)];
    let mut result = ConcurrenceMax {
        temp_right: temps[best],
        concurrence: values[best],
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    while b - a > 1e-9 * (1.0 + hi) {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v > result.concurrence {
            result = ConcurrenceMax {
                temp_right: t,
                concurrence: v,
            };
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainSpec;
    use approx::assert_abs_diff_eq;

    fn x(a: f64, c: f64, e: f64) -> XStateCoeffs {
        XStateCoeffs {
            r: 0,
            s: 1,
            a,
            b: 0.5 - a,
            c,
            d: 0.5 - e,
            e,
        }
    }

    #[test]
    fn concurrence_extremes() {
        assert_eq!(concurrence(&x(0.0, 0.5, 0.0)), 1.0);
        assert_eq!(concurrence(&x(0.25, 0.0, 0.25)), 0.0);
        assert_eq!(concurrence(&x(0.1, -0.3, 0.1)), 2.0 * (0.3 - 0.1));
    }

    #[test]
    fn two_site_coefficients() {
        let modes = ModeTable::new(&ChainSpec::new(2, 1.0, 0.6).unwrap());
        let f = steady_factors(&modes, &BathSpec::equal_weights(2, 0.2, 3.0).unwrap()).unwrap();
        let lam = |s: &str| f.eigenvalue(&s.parse().unwrap());
        let c = xstate_coeffs(&modes, &f, 0, 1).unwrap();
        assert_abs_diff_eq!(c.a, lam("11"), epsilon = 1e-15);
        assert_abs_diff_eq!(c.b, 0.5 * (lam("10") + lam("01")), epsilon = 1e-15);
        assert_abs_diff_eq!(c.d, c.b, epsilon = 1e-15);
        assert_abs_diff_eq!(c.c, 0.5 * (lam("10") - lam("01")), epsilon = 1e-15);
        assert_abs_diff_eq!(c.e, lam("00"), epsilon = 1e-15);
    }

    #[test]
    fn lazy_and_materialized_agree() {
        for n in 2..=7 {
            let modes = ModeTable::new(&ChainSpec::near_saturation(n, 3.0, 0.9).unwrap());
            let f =
                steady_factors(&modes, &BathSpec::equal_weights(n, 0.5, 11.0).unwrap()).unwrap();
            let rep = SpinRepresentation::new(&modes).unwrap();
            for r in 0..n {
                for s in r + 1..n {
                    let m = xstate_from_rep(&rep, &f, r, s).unwrap();
                    let l = xstate_lazy(&modes, &f, r, s).unwrap();
                    for (p, q) in [(m.a, l.a), (m.b, l.b), (m.c, l.c), (m.d, l.d), (m.e, l.e)] {
                        assert_abs_diff_eq!(p, q, epsilon = 1e-14);
                    }
                    assert_abs_diff_eq!(m.trace(), 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn bad_pairs() {
        let modes = ModeTable::new(&ChainSpec::new(3, 1.0, 0.1).unwrap());
        let f = steady_factors(&modes, &BathSpec::equal_weights(3, 0.2, 3.0).unwrap()).unwrap();
        assert!(xstate_coeffs(&modes, &f, 1, 1).is_err());
        assert!(xstate_coeffs(&modes, &f, 0, 3).is_err());
        let m4 = ModeTable::new(&ChainSpec::new(4, 1.0, 0.1).unwrap());
        assert!(
            simplified_c_3spin(&m4, &BathSpec::equal_weights(4, 1.0, 2.0).unwrap(), 0, 1).is_err()
        );
    }

    #[test]
    fn zero_temperature_three_site() {
        let modes = ModeTable::new(&ChainSpec::new(3, 1.0, 0.5).unwrap());
        let baths = BathSpec::equal_weights(3, 0.0, 0.0).unwrap();
        for (r, s) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(simplified_c_3spin(&modes, &baths, r, s).unwrap(), 0.0);
        }
    }
}
