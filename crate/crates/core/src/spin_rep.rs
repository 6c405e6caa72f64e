//! The stationary state in the spin basis.
//!
//! A weight-p Fock state with modes I = {i_1 < … < i_p} expands as
//! |I⟩ = Σ_J D^I_J σ+^{j_1} … σ+^{j_p} |↓…↓⟩ with D^I_J the p×p minor of u
//! on rows I and columns J. Hence ρ∞ is block diagonal over p with blocks
//! S^(p) = D^(p) L^(p) D^(p), L^(p) = diag(Λ) in combinadic order.

use std::collections::HashMap;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::chain::{FockString, ModeTable};
use crate::combinadics::{sector_size, unrank, weight_class, CombinadicIndex};
use crate::dense::{sector_offset, Basis, DenseState};
use crate::error::{Error, Result};
use crate::steady_state::SteadyFactors;

/// Largest N for which dense matrices are built by default.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Rows (modes) and columns (sites) of a minor, as occupation masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinorKey {
    pub rows: FockString,
    pub cols: FockString,
}

impl MinorKey {
    pub fn new(rows: FockString, cols: FockString) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::LengthMismatch {
                expected: rows.len(),
                actual: cols.len(),
            });
        }
        if rows.weight() != cols.weight() {
            return Err(Error::InvalidChain(format!(
                "minor needs as many rows as columns, got {} and {}",
                rows.weight(),
                cols.weight()
            )));
        }
        Ok(Self { rows, cols })
    }

    /// From 0-based strictly increasing index lists.
    pub fn from_lists(n: usize, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let mask = |list: &[usize]| -> Result<FockString> {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidChain(format!(
                    "{list:?} is not strictly increasing"
                )));
            }
            if let Some(&k) = list.iter().find(|&&k| k >= n) {
                return Err(Error::SiteOutOfRange {
                    site: k + 1,
                    n_sites: n,
                });
            }
            FockString::new(n, list.iter().fold(0, |acc, &k| acc | 1 << k))
        };
        Self::new(mask(rows)?, mask(cols)?)
    }
}

pub fn minor_determinant(modes: &ModeTable, key: &MinorKey) -> f64 {
    let rows: Vec<usize> = key.rows.ones().collect();
    let cols: Vec<usize> = key.cols.ones().collect();
    let at = |a: usize, b: usize| modes.u(rows[a], cols[b]);
    match rows.len() {
        0 => 1.0,
        1 => at(0, 0),
        2 => at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0),
        3 => Matrix3::from_fn(at).determinant(),
        p => lu_determinant(DMatrix::from_fn(p, p, at)),
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
fn lu_determinant(mut m: DMatrix<f64>) -> f64 {
    let p = m.nrows();
    let mut det = 1.0;
    for k in 0..p {
        let pivot = (k..p)
            .max_by(|&a, &b| m[(a, k)].abs().total_cmp(&m[(b, k)].abs()))
            .expect("non-empty column");
        if m[(pivot, k)] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap_rows(pivot, k);
            det = -det;
        }
        let diag = m[(k, k)];
        det *= diag;
        for i in k + 1..p {
            let factor = m[(i, k)] / diag;
            if factor != 0.0 {
                for j in k + 1..p {
                    m[(i, j)] -= factor * m[(k, j)];
                }
            }
        }
    }
    det
}

/// Memoized minors of one mode table. Not shared between threads.
#[derive(Debug)]
pub struct MinorCache<'a> {
    modes: &'a ModeTable,
    table: HashMap<(u64, u64), f64>,
}

impl<'a> MinorCache<'a> {
    pub fn new(modes: &'a ModeTable) -> Self {
        Self {
            modes,
            table: HashMap::new(),
        }
    }

    pub fn get(&mut self, rows: FockString, cols: FockString) -> f64 {
        let modes = self.modes;
        *self
            .table
            .entry((rows.bits(), cols.bits()))
            .or_insert_with(|| minor_determinant(modes, &MinorKey { rows, cols }))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// A weight-p block indexed by combinadic rank (rank r at row/column r−1).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    pub p: usize,
    pub entries: DMatrix<f64>,
}

fn check_weight(n: usize, p: usize) -> Result<()> {
    if p > n {
        return Err(Error::RankOutOfRange {
            weight: p,
            rank: 1,
            max: 0,
        });
    }
    Ok(())
}

/// D^(p): rows are mode sets, columns site sets.
pub fn block_d(modes: &ModeTable, p: usize) -> Result<BlockMatrix> {
    let n = modes.n_sites();
    check_weight(n, p)?;
    let class: Vec<FockString> = weight_class(n, p).collect();
    let entries = DMatrix::from_fn(class.len(), class.len(), |a, b| {
        minor_determinant(
            modes,
            &MinorKey {
                rows: class[a],
                cols: class[b],
            },
        )
    });
    Ok(BlockMatrix { p, entries })
}

/// Λ over the weight-p strings in rank order.
pub fn sector_eigenvalues(factors: &SteadyFactors, p: usize) -> Vec<f64> {
    weight_class(factors.n_modes(), p)
        .map(|s| factors.eigenvalue(&s))
        .collect()
}

fn conjugate(d: &DMatrix<f64>, lambda: &[f64]) -> DMatrix<f64> {
    let mut scaled = d.clone();
    for (i, mut row) in scaled.row_iter_mut().enumerate() {
        row *= lambda[i];
    }
    d.transpose() * scaled
}

/// S^(p) = D^(p)ᵀ L^(p) D^(p).
pub fn block_s(modes: &ModeTable, factors: &SteadyFactors, p: usize) -> Result<BlockMatrix> {
    let d = block_d(modes, p)?;
    Ok(BlockMatrix {
        p,
        entries: conjugate(&d.entries, &sector_eigenvalues(factors, p)),
    })
}

/// One entry of S^(p) without building the block.
pub fn block_s_entry(
    modes: &ModeTable,
    factors: &SteadyFactors,
    p: usize,
    rank_row: u64,
    rank_col: u64,
) -> Result<f64> {
    block_s_entry_cached(&mut MinorCache::new(modes), factors, p, rank_row, rank_col)
}

pub fn block_s_entry_cached(
    cache: &mut MinorCache<'_>,
    factors: &SteadyFactors,
    p: usize,
    rank_row: u64,
    rank_col: u64,
) -> Result<f64> {
    let n = cache.modes.n_sites();
    let row = unrank(
        n,
        CombinadicIndex {
            weight: p,
            rank: rank_row,
        },
    )?;
    let col = unrank(
        n,
        CombinadicIndex {
            weight: p,
            rank: rank_col,
        },
    )?;
    Ok(s_entry_from_strings(cache, factors, row, col))
}

/// Σ_I Λ_I D^I_row D^I_col over all mode sets I of the common weight.
pub(crate) fn s_entry_from_strings(
    cache: &mut MinorCache<'_>,
    factors: &SteadyFactors,
    row: FockString,
    col: FockString,
) -> f64 {
    weight_class(row.len(), row.weight())
        .map(|modes| {
            let lambda = factors.eigenvalue(&modes);
            if lambda == 0.0 {
                0.0
            } else {
                lambda * cache.get(modes, row) * cache.get(modes, col)
            }
        })
        .sum()
}

/// The D^(p) blocks of one chain, reusable across bath settings.
#[derive(Debug, Clone)]
pub struct SpinRepresentation {
    n_sites: usize,
    d_blocks: Vec<DMatrix<f64>>,
}

impl SpinRepresentation {
    pub fn new(modes: &ModeTable) -> Result<Self> {
        Self::with_limit(modes, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_limit(modes: &ModeTable, limit: usize) -> Result<Self> {
        let n = modes.n_sites();
        if n > limit {
            return Err(Error::SizeLimit {
                what: "materialized D blocks",
                n_sites: n,
                limit,
            });
        }
        let d_blocks = (0..=n)
            .map(|p| block_d(modes, p).map(|b| b.entries))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_sites: n,
            d_blocks,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn d_block(&self, p: usize) -> &DMatrix<f64> {
        &self.d_blocks[p]
    }

    pub fn s_block(&self, factors: &SteadyFactors, p: usize) -> BlockMatrix {
        BlockMatrix {
            p,
            entries: conjugate(&self.d_blocks[p], &sector_eigenvalues(factors, p)),
        }
    }

    pub fn s_blocks(&self, factors: &SteadyFactors) -> Vec<BlockMatrix> {
        (0..=self.n_sites)
            .map(|p| self.s_block(factors, p))
            .collect()
    }

    /// S^(p) entry at 0-based positions inside the block.
    pub fn s_entry(&self, lambda: &[f64], p: usize, row: usize, col: usize) -> f64 {
        let d = &self.d_blocks[p];
        (0..d.nrows())
            .map(|i| lambda[i] * d[(i, row)] * d[(i, col)])
            .sum()
    }
}

pub fn assemble_density_matrix(modes: &ModeTable, factors: &SteadyFactors) -> Result<DenseState> {
    assemble_density_matrix_with_limit(modes, factors, DEFAULT_DENSE_LIMIT)
}

/// ρ∞ in the spin sector basis.
pub fn assemble_density_matrix_with_limit(
    modes: &ModeTable,
    factors: &SteadyFactors,
    limit: usize,
) -> Result<DenseState> {
    let n = modes.n_sites();
    if n > limit {
        return Err(Error::SizeLimit {
            what: "dense assembly",
            n_sites: n,
            limit,
        });
    }
    let rep = SpinRepresentation::with_limit(modes, limit)?;
    let dim = 1usize << n;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for p in 0..=n {
        let block = rep.s_block(factors, p).entries;
        let off = sector_offset(n, p);
        let size = sector_size(n, p) as usize;
        for j in 0..size {
            for i in 0..size {
                rho[(off + i, off + j)] = Complex64::new(block[(i, j)], 0.0);
            }
        }
    }
    DenseState::new(n, Basis::SpinSector, rho)
}
