//! Combinadic numbering of fixed-weight Fock strings.
//!
//! A string with ones at 1-based positions i_1 < … < i_p has rank
//! 1 + Σ_ℓ C(i_ℓ − 1, ℓ), with C(a, b) = 0 whenever a < b or either argument
//! is negative. Rank order is colexicographic order.

use std::sync::OnceLock;

use crate::chain::{FockString, MAX_SITES};
use crate::error::{Error, Result};

const TABLE: usize = MAX_SITES + 1;

fn table() -> &'static [[u64; TABLE]; TABLE] {
    static CELL: OnceLock<Box<[[u64; TABLE]; TABLE]>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut t = Box::new([[0u64; TABLE]; TABLE]);
        for n in 0..TABLE {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            }
        }
        t
    })
}

/// C(n, k), zero outside 0 ≤ k ≤ n.
pub fn binomial(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    assert!(
        n <= MAX_SITES as i64,
        "binomial table covers n <= {MAX_SITES}"
    );
    table()[n as usize][k as usize]
}

/// Number of weight-`p` strings on `n` modes.
pub fn sector_size(n: usize, p: usize) -> u64 {
    binomial(n as i64, p as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinadicIndex {
    pub weight: usize,
    pub rank: u64,
}

impl CombinadicIndex {
    pub fn new(n: usize, weight: usize, rank: u64) -> Result<Self> {
        let max = sector_size(n, weight);
        if weight > n || rank == 0 || rank > max {
            return Err(Error::RankOutOfRange { weight, rank, max });
        }
        Ok(Self { weight, rank })
    }
}

pub fn rank(bits: &FockString) -> CombinadicIndex {
    let rank = 1 + bits
        .ones()
        .enumerate()
        .map(|(l, i)| binomial(i as i64, l as i64 + 1))
        .sum::<u64>();
    CombinadicIndex {
        weight: bits.weight(),
        rank,
    }
}

/// Greedy inverse of [`rank`].
pub fn unrank(n: usize, idx: CombinadicIndex) -> Result<FockString> {
    let idx = CombinadicIndex::new(n, idx.weight, idx.rank)?;
    let mut rem = idx.rank - 1;
    let mut bits = 0u64;
    // `top` is an exclusive bound on the 0-based position of the next one.
    let mut top = n;
    for l in (1..=idx.weight).rev() {
        let mut pos = top - 1;
        while binomial(pos as i64, l as i64) > rem {
            pos -= 1;
        }
        rem -= binomial(pos as i64, l as i64);
        bits |= 1 << pos;
        top = pos;
    }
    FockString::new(n, bits)
}

/// All weight-`p` strings on `n` modes, in rank order.
pub fn weight_class(n: usize, p: usize) -> impl Iterator<Item = FockString> {
    (1..=sector_size(n, p))
        .map(move |rank| unrank(n, CombinadicIndex { weight: p, rank }).expect("rank in range"))
}

/// Weight-p strings with prescribed occupations at sites r < s (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFamily {
    pub r: usize,
    pub s: usize,
    pub occ_r: bool,
    pub occ_s: bool,
    pub members: Vec<(FockString, CombinadicIndex)>,
}

impl IndexFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Enumerates the family with ranks from the pivot closed forms.
///
/// Members are sorted by rank; since rank order is colex order and the (r, s)
/// bits are fixed, the k-th member of every variant carries the same pattern
/// on the remaining sites.
pub fn index_family(
    n: usize,
    p: usize,
    r: usize,
    s: usize,
    occ_r: bool,
    occ_s: bool,
) -> Result<IndexFamily> {
    if !(r < s && s < n) {
        return Err(Error::InvalidPair {
            r: r + 1,
            s: s + 1,
            n_sites: n,
        });
    }
    let pinned = occ_r as usize + occ_s as usize;
    let mut family = IndexFamily {
        r,
        s,
        occ_r,
        occ_s,
        members: Vec::new(),
    };
    if p < pinned || p - pinned > n - 2 {
        return Ok(family);
    }
    let q = p - pinned;
    let others: Vec<usize> = (0..n).filter(|&k| k != r && k != s).collect();
    let count = sector_size(n - 2, q);
    family.members.reserve(count as usize);
    for compressed_rank in 1..=count {
        let compressed = unrank(
            n - 2,
            CombinadicIndex {
                weight: q,
                rank: compressed_rank,
            },
        )?;
        let off: Vec<usize> = compressed.ones().map(|k| others[k]).collect();
        let mut bits = off.iter().fold(0u64, |acc, &k| acc | 1 << k);
        if occ_r {
            bits |= 1 << r;
        }
        if occ_s {
            bits |= 1 << s;
        }
        let string = FockString::new(n, bits)?;
        let rank = closed_form_rank(&off, r, s, occ_r, occ_s);
        family
            .members
            .push((string, CombinadicIndex { weight: p, rank }));
    }
    Ok(family)
}

/// Rank of the string whose remaining ones sit at `off` (0-based, ascending),
/// written with the pivots r* and s* (number of remaining ones below r and s).
fn closed_form_rank(off: &[usize], r: usize, s: usize, occ_r: bool, occ_s: bool) -> u64 {
    // 1-based positions and sums as in the textbook statement.
    let pos = |k: usize| off[k] as i64 + 1;
    let c = |a: i64, b: usize| binomial(a, b as i64);
    let (r1, s1) = (r as i64 + 1, s as i64 + 1);
    let r_star = off.iter().take_while(|&&k| k < r).count();
    let s_star = off.iter().take_while(|&&k| k < s).count();
    let q = off.len();
    // `shifted(lo, hi, by)` = Σ_{ℓ=lo}^{hi} C(i_ℓ − 1, ℓ + by), empty when lo > hi.
    let shifted = |lo: usize, hi: usize, by: usize| -> u64 {
        (lo..=hi)
            .filter(|&l| l >= 1 && l <= q)
            .map(|l| c(pos(l - 1) - 1, l + by))
            .sum()
    };
    1 + match (occ_r, occ_s) {
        (false, false) => shifted(1, q, 0),
        (false, true) => shifted(1, s_star, 0) + c(s1 - 1, s_star + 1) + shifted(s_star + 1, q, 1),
        (true, false) => shifted(1, r_star, 0) + c(r1 - 1, r_star + 1) + shifted(r_star + 1, q, 1),
        (true, true) => {
            shifted(1, r_star, 0)
                + c(r1 - 1, r_star + 1)
                + shifted(r_star + 1, s_star, 1)
                + c(s1 - 1, s_star + 2)
                + shifted(s_star + 1, q, 2)
        }
    }
}
