//! Euler characteristics from global sections.
//!
//! Every `chi(O(-k Gamma_i - l Delta_j))` with `k, l >= 1` has only top
//! cohomology, which by Serre duality is the dual of `H^0(X_n, O(S))` for the
//! divisor `S = (k-1) Gamma_i - Delta_i + l Delta_j`. The characters of that
//! space are the lattice points `m` with `sum(m) = 0` and
//! `sum_{h in S} m_h <= a_S` for every proper non-empty subset `S`.
//!
//! Subsets of `[n+1]` are bitmasks: bit `h-1` stands for element `h`.

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::algebra::{binomial, ExponentVec, LaurentPoly};
use crate::error::{Error, Result};

/// Largest supported dimension (subset tables have `2^{n+1}` slots).
pub const MAX_DIM: usize = 12;

/// Coefficients `a_S` of a torus-invariant divisor `sum_S a_S D_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorCoeffs {
    n: usize,
    // indexed by mask; slots 0 and the full mask are unused
    coeffs: Vec<i64>,
}

impl DivisorCoeffs {
    pub fn from_fn(n: usize, mut f: impl FnMut(u32) -> i64) -> Result<Self> {
        check_dim(n)?;
        let full = full_mask(n);
        let coeffs = (0..=full)
            .map(|mask| if mask == 0 || mask == full { 0 } else { f(mask) })
            .collect();
        Ok(DivisorCoeffs { n, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `a_S` for a proper non-empty subset given as a bitmask.
    pub fn get(&self, mask: u32) -> i64 {
        debug_assert!(mask != 0 && mask != full_mask(self.n));
        self.coeffs[mask as usize]
    }

    /// Number of prime divisors, `2^{n+1} - 2`.
    pub fn len(&self) -> usize {
        self.coeffs.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(mask, a_S)` over all proper non-empty subsets.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        let full = full_mask(self.n);
        (1..full).map(move |m| (m, self.coeffs[m as usize]))
    }

    /// Whether `m` satisfies every inequality `sum_{h in S} m_h <= a_S`.
    pub fn contains(&self, m: &[i32]) -> bool {
        self.iter().all(|(mask, a)| subset_sum(m, mask) <= a)
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    (1u32 << (n + 1)) - 1
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::arg(format!("dimension {n} exceeds the supported maximum {MAX_DIM}")));
    }
    Ok(())
}

fn check_index(name: &str, v: usize, n: usize) -> Result<()> {
    if v == 0 || v > n + 1 {
        return Err(Error::arg(format!("{name} = {v} outside 1..={}", n + 1)));
    }
    Ok(())
}

pub(crate) fn check_chi_args(i: usize, j: usize, a: usize, n: usize) -> Result<()> {
    check_index("i", i, n)?;
    check_index("j", j, n)?;
    if a > n {
        return Err(Error::arg(format!("a = {a} exceeds n = {n}")));
    }
    Ok(())
}

fn subset_sum(m: &[i32], mask: u32) -> i64 {
    m.iter()
        .enumerate()
        .filter(|(h, _)| mask >> h & 1 == 1)
        .map(|(_, &x)| x as i64)
        .sum()
}

/// Coefficients of `S_ij^{kl} = (k-1) Gamma_i - Delta_i + l Delta_j`.
pub fn divisor_coeffs_s(i: usize, j: usize, k: usize, l: usize, n: usize) -> Result<DivisorCoeffs> {
    check_dim(n)?;
    check_index("i", i, n)?;
    check_index("j", j, n)?;
    if k == 0 || l == 0 {
        return Err(Error::arg("k and l must be at least 1"));
    }
    let (k, l) = (k as i64, l as i64);
    let bi = 1u32 << (i - 1);
    let bj = 1u32 << (j - 1);
    DivisorCoeffs::from_fn(n, |mask| {
        let has_i = mask & bi != 0;
        let has_j = mask & bj != 0;
        if i == j {
            return if has_i { k - 1 } else { l - 1 };
        }
        match (has_i, has_j) {
            (true, true) => k - 1,
            (true, false) => k + l - 1,
            (false, true) => -1,
            (false, false) => l - 1,
        }
    })
}

/// Sum of `t^m` over the characters `m` of `H^0(O(D))`.
pub fn lattice_points(d: &DivisorCoeffs) -> LaurentPoly {
    let nvars = d.n + 1;
    let points = enumerate_points(d);
    let mut p = LaurentPoly::zero(nvars);
    for m in points {
        p.add_term(ExponentVec::from(m), BigInt::one());
    }
    p
}

/// Depth-first search over coordinates. Each subset's inequality (and the
/// complementary lower bound) is checked as soon as its largest element is
/// assigned; the last coordinate is forced by `sum(m) = 0`.
fn enumerate_points(d: &DivisorCoeffs) -> Vec<Vec<i32>> {
    let nv = d.n + 1;
    if nv == 1 {
        return vec![vec![0]];
    }
    let full = full_mask(d.n);
    let bounds: Vec<(i64, i64)> = (0..nv)
        .map(|h| {
            let s = 1u32 << h;
            (-d.get(full ^ s), d.get(s))
        })
        .collect();
    let (lo0, hi0) = bounds[0];
    if lo0 > hi0 {
        return Vec::new();
    }

    let mut out: Vec<Vec<i32>> = (lo0..=hi0)
        .into_par_iter()
        .map(|v0| {
            let mut search = Search {
                d,
                full,
                nv,
                bounds: &bounds,
                sums: vec![0; 1usize << nv],
                m: vec![0; nv],
                found: Vec::new(),
            };
            if search.assign(0, v0) {
                search.descend(1);
            }
            search.found
        })
        .flatten()
        .collect();
    out.sort_unstable();
    out
}

struct Search<'a> {
    d: &'a DivisorCoeffs,
    full: u32,
    nv: usize,
    bounds: &'a [(i64, i64)],
    sums: Vec<i64>,
    m: Vec<i32>,
    found: Vec<Vec<i32>>,
}

impl Search<'_> {
    /// Sets coordinate `pos` and validates every subset whose largest
    /// element is `pos`.
    fn assign(&mut self, pos: usize, v: i64) -> bool {
        let (lo, hi) = self.bounds[pos];
        if v < lo || v > hi {
            return false;
        }
        self.m[pos] = v as i32;
        let bit = 1u32 << pos;
        for prefix in 0..bit {
            let s = prefix | bit;
            let sum = self.sums[prefix as usize] + v;
            self.sums[s as usize] = sum;
            if s == self.full {
                if sum != 0 {
                    return false;
                }
                continue;
            }
            if sum > self.d.get(s) || sum < -self.d.get(self.full ^ s) {
                return false;
            }
        }
        true
    }

    fn descend(&mut self, pos: usize) {
        if pos == self.nv - 1 {
            let last = -self.sums[(self.full >> 1) as usize];
            if self.assign(pos, last) {
                debug_assert!(self.d.contains(&self.m));
                self.found.push(self.m.clone());
            }
            return;
        }
        let (lo, hi) = self.bounds[pos];
        for v in lo..=hi {
            if self.assign(pos, v) {
                self.descend(pos + 1);
            }
        }
    }
}

/// `chi_T(A_{n,i}^a ⊗ B_{n,j}^{n-a})` from global sections:
/// `1 + sum_{k,l>=1} (-1)^{n+k+l} C(a,k) C(n-a,l) H^0(S_ij^{kl})^dual`.
pub fn chi_lattice(i: usize, j: usize, a: usize, n: usize) -> Result<LaurentPoly> {
    check_dim(n)?;
    check_chi_args(i, j, a, n)?;
    let mut chi = LaurentPoly::one(n + 1);
    for k in 1..=a {
        for l in 1..=n - a {
            let mut c = binomial(a, k) * binomial(n - a, l);
            if (n + k + l) % 2 == 1 {
                c = -c;
            }
            let h0 = lattice_points(&divisor_coeffs_s(i, j, k, l, n)?);
            chi.add_scaled(&h0.dualize(), &c);
        }
    }
    Ok(chi)
}
