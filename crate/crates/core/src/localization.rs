//! Euler characteristics by equivariant localization.
//!
//! `chi_T(F) = sum_sigma F_sigma / prod_s (1 - t_{sigma(s)}^{-1} t_{sigma(s+1)})`
//! over all permutations `sigma` of `[n+1]`. Each denominator factor is
//! rewritten as `(t_{sigma(s)} - t_{sigma(s+1)}) / t_{sigma(s)}`, so every
//! term sits over a sub-product of the Vandermonde
//! `V = prod_{a<b} (t_a - t_b)`. Numerators are lifted to `V`, summed, and
//! the total is divided by each linear factor of `V` in turn. The sum is a
//! Laurent polynomial for any class coming from `K_T(X_n)`, so every division
//! must be exact.
//!
//! Summation is split into blocks of permutations that are reduced
//! independently and then added; the result does not depend on the split.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::algebra::{binomial, exact_div_binomial, linear_binomial, ExponentVec, LaurentPoly};
use crate::error::{Error, Result};
use crate::lattice::check_chi_args;

/// Largest dimension accepted by the localization routes.
pub const MAX_DIM: usize = 9;

/// A permutation `sigma` of `[n+1]`, stored as its images `sigma(1), ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::arg(format!("{images:?} is not a permutation of 1..={n}")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((1..=len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// The permutation read backwards, `sigma(n+1-s)`.
    pub fn reversed(&self) -> Self {
        Permutation(self.0.iter().rev().copied().collect())
    }

    /// `(sigma(s), sigma(s+1))` for `s = 1..n`.
    pub fn consecutive_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }
}

/// All permutations of `[len]` in lexicographic order.
pub fn permutations(len: usize) -> Vec<Permutation> {
    (1..=len)
        .permutations(len)
        .map(Permutation)
        .collect()
}

/// One fixed-point contribution `numerator / prod (1 - t_b / t_a)` over the
/// consecutive pairs `(a, b)` of a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTerm {
    pub numerator: LaurentPoly,
    pub denom_pairs: Vec<(usize, usize)>,
}

impl SigmaTerm {
    pub fn new(sigma: &Permutation, numerator: LaurentPoly) -> Self {
        SigmaTerm {
            numerator,
            denom_pairs: sigma.consecutive_pairs().collect(),
        }
    }

    /// Bitmask of the unordered pairs in the denominator, see [`pair_index`].
    fn edge_mask(&self, nvars: usize) -> u64 {
        self.denom_pairs
            .iter()
            .fold(0, |acc, &(a, b)| acc | 1u64 << pair_index(a.min(b), a.max(b), nvars))
    }

    /// `numerator * prod_s t_{sigma(s)}`, signed so that every denominator
    /// factor reads `t_a - t_b` with `a < b`.
    fn lifted_numerator(&self) -> LaurentPoly {
        let nvars = self.numerator.nvars();
        let mut shift = ExponentVec::zero(nvars);
        let mut negative = false;
        for &(a, b) in &self.denom_pairs {
            shift.as_mut_slice()[a - 1] += 1;
            negative ^= a > b;
        }
        let sign = if negative { -BigInt::one() } else { BigInt::one() };
        self.numerator.mul_monomial(&shift, &sign)
    }
}

/// Position of the pair `a < b` (1-based) in the lexicographic list of pairs.
fn pair_index(a: usize, b: usize, nvars: usize) -> usize {
    debug_assert!(a < b && b <= nvars);
    let before: usize = (1..a).map(|r| nvars - r).sum();
    before + (b - a - 1)
}

fn all_pairs(nvars: usize) -> Vec<(usize, usize)> {
    (1..=nvars)
        .flat_map(|a| (a + 1..=nvars).map(move |b| (a, b)))
        .collect()
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::arg(format!(
            "dimension {n} exceeds the localization maximum {MAX_DIM}"
        )));
    }
    Ok(())
}

/// Numerator over `V` contributed by a block of permutations. Terms sharing
/// a denominator (a path and its reverse) are combined before the cofactor
/// multiplication.
pub fn partial_numerator<F>(perms: &[Permutation], nvars: usize, numerator_of: &F) -> LaurentPoly
where
    F: Fn(&Permutation) -> LaurentPoly,
{
    let mut groups: HashMap<u64, LaurentPoly> = HashMap::new();
    for sigma in perms {
        let num = numerator_of(sigma);
        assert_eq!(num.nvars(), nvars, "numerator has the wrong variable count");
        if num.is_zero() {
            continue;
        }
        let term = SigmaTerm::new(sigma, num);
        let lifted = term.lifted_numerator();
        *groups
            .entry(term.edge_mask(nvars))
            .or_insert_with(|| LaurentPoly::zero(nvars)) += &lifted;
    }

    let pairs = all_pairs(nvars);
    let mut keys: Vec<u64> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut total = LaurentPoly::zero(nvars);
    for key in keys {
        let group = &groups[&key];
        if group.is_zero() {
            continue;
        }
        let mut acc = group.clone();
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            if key >> idx & 1 == 0 {
                acc = &acc * &linear_binomial(nvars, a, b);
            }
        }
        total += &acc;
    }
    total
}

/// Divides a numerator over `V` by every `t_a - t_b`, `a < b`.
pub fn collapse(numerator: LaurentPoly) -> Result<LaurentPoly> {
    let nvars = numerator.nvars();
    let mut p = numerator;
    for (a, b) in all_pairs(nvars) {
        if p.is_zero() {
            break;
        }
        p = exact_div_binomial(&p, a, b)?;
    }
    Ok(p)
}

/// Exact value of the localization sum for the family `numerator_of` on
/// `X_n`, summed in `blocks` independent contiguous blocks of permutations.
/// Blocks are reduced on the current rayon pool.
pub fn localize_sum_blocks<F>(numerator_of: F, n: usize, blocks: usize) -> Result<LaurentPoly>
where
    F: Fn(&Permutation) -> LaurentPoly + Sync,
{
    check_dim(n)?;
    let nvars = n + 1;
    let perms = permutations(nvars);
    let blocks = blocks.clamp(1, perms.len());
    let chunk = perms.len().div_ceil(blocks);
    let partials: Vec<LaurentPoly> = perms
        .par_chunks(chunk)
        .map(|c| partial_numerator(c, nvars, &numerator_of))
        .collect();
    let mut total = LaurentPoly::zero(nvars);
    for p in &partials {
        total += p;
    }
    let result = collapse(total)?;
    #[cfg(debug_assertions)]
    sanity::check_at_random_point(&perms, &numerator_of, &result);
    Ok(result)
}

/// [`localize_sum_blocks`] on a dedicated pool of `workers` threads, one
/// block per worker. `workers == 1` runs sequentially.
pub fn localize_sum_with<F>(numerator_of: F, n: usize, workers: usize) -> Result<LaurentPoly>
where
    F: Fn(&Permutation) -> LaurentPoly + Sync + Send,
{
    let workers = workers.max(1);
    if workers == 1 {
        return localize_sum_blocks(numerator_of, n, 1);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::arg(format!("cannot start worker pool: {e}")))?;
    pool.install(|| localize_sum_blocks(numerator_of, n, workers))
}

/// [`localize_sum_blocks`] on the global pool.
pub fn localize_sum<F>(numerator_of: F, n: usize) -> Result<LaurentPoly>
where
    F: Fn(&Permutation) -> LaurentPoly + Sync,
{
    localize_sum_blocks(numerator_of, n, rayon::current_num_threads())
}

/// Fiber of `O(-k Gamma_i - l Delta_j)` at the fixed point `sigma`:
/// `t_{sigma(1)}^{-l} t_i^{-k} t_j^l t_{sigma(n+1)}^k`.
pub fn fiber_od(i: usize, j: usize, k: usize, l: usize, sigma: &Permutation) -> LaurentPoly {
    let mut e = ExponentVec::zero(sigma.len());
    let (k, l) = (k as i32, l as i32);
    let s = e.as_mut_slice();
    s[sigma.first() - 1] -= l;
    s[i - 1] -= k;
    s[j - 1] += l;
    s[sigma.last() - 1] += k;
    LaurentPoly::monomial(e, 1)
}

/// Fiber of `O(-k Gamma - l Delta)` with the untwisted linearization:
/// `t_{sigma(1)}^{-l} t_{sigma(n+1)}^k`.
pub fn fiber_general(k: usize, l: usize, sigma: &Permutation) -> LaurentPoly {
    let mut e = ExponentVec::zero(sigma.len());
    let s = e.as_mut_slice();
    s[sigma.first() - 1] -= l as i32;
    s[sigma.last() - 1] += k as i32;
    LaurentPoly::monomial(e, 1)
}

/// `chi_T(O(-k Gamma_i - l Delta_j))`.
pub fn chi_kernel(i: usize, j: usize, k: usize, l: usize, n: usize) -> Result<LaurentPoly> {
    check_dim(n)?;
    check_chi_args(i, j, 0, n)?;
    localize_sum(|s| fiber_od(i, j, k, l, s), n)
}

/// `chi_T(O(-k Gamma - l Delta))`.
pub fn chi_general_kernel(n: usize, k: usize, l: usize) -> Result<LaurentPoly> {
    localize_sum(|s| fiber_general(k, l, s), n)
}

/// `(k, l, (-1)^{k+l} C(a,k) C(n-a,l))` for `k, l >= 1`.
fn expansion(a: usize, n: usize) -> Vec<(usize, usize, BigInt)> {
    let mut out = Vec::new();
    for k in 1..=a {
        for l in 1..=n - a {
            let mut c = binomial(a, k) * binomial(n - a, l);
            if (k + l) % 2 == 1 {
                c = -c;
            }
            out.push((k, l, c));
        }
    }
    out
}

/// Combined fixed-point numerator of the double sum; by linearity one
/// localization pass replaces one pass per `(k, l)`.
fn combined<G>(coeffs: &[(usize, usize, BigInt)], nvars: usize, fiber: G) -> impl Fn(&Permutation) -> LaurentPoly + Sync + Send + '_
where
    G: Fn(usize, usize, &Permutation) -> LaurentPoly + Sync + Send + 'static,
{
    move |sigma| {
        let mut num = LaurentPoly::zero(nvars);
        for (k, l, c) in coeffs {
            num.add_scaled(&fiber(*k, *l, sigma), c);
        }
        num
    }
}

/// `chi_T(A_{n,i}^a ⊗ B_{n,j}^{n-a}) = 1 + sum (-1)^{k+l} C(a,k) C(n-a,l) chi_kernel`.
pub fn chi_localization(i: usize, j: usize, a: usize, n: usize) -> Result<LaurentPoly> {
    chi_localization_with(i, j, a, n, None)
}

/// As [`chi_localization`]; `workers` selects a dedicated pool size,
/// `None` uses the global pool.
pub fn chi_localization_with(i: usize, j: usize, a: usize, n: usize, workers: Option<usize>) -> Result<LaurentPoly> {
    check_dim(n)?;
    check_chi_args(i, j, a, n)?;
    let coeffs = expansion(a, n);
    let mut chi = LaurentPoly::one(n + 1);
    if coeffs.is_empty() {
        return Ok(chi);
    }
    let f = combined(&coeffs, n + 1, move |k, l, s| fiber_od(i, j, k, l, s));
    chi += &match workers {
        Some(w) => localize_sum_with(f, n, w)?,
        None => localize_sum(f, n)?,
    };
    Ok(chi)
}

/// `chi_T(A_n^a ⊗ B_n^{n-a})` for the untwisted classes.
pub fn chi_general(n: usize, a: usize) -> Result<LaurentPoly> {
    chi_general_with(n, a, None)
}

pub fn chi_general_with(n: usize, a: usize, workers: Option<usize>) -> Result<LaurentPoly> {
    check_dim(n)?;
    if a > n {
        return Err(Error::arg(format!("a = {a} exceeds n = {n}")));
    }
    let coeffs = expansion(a, n);
    let mut chi = LaurentPoly::one(n + 1);
    if coeffs.is_empty() {
        return Ok(chi);
    }
    let f = combined(&coeffs, n + 1, fiber_general);
    chi += &match workers {
        Some(w) => localize_sum_with(f, n, w)?,
        None => localize_sum(f, n)?,
    };
    Ok(chi)
}

#[cfg(debug_assertions)]
mod sanity {
    //! Evaluates the raw rational sum at a random point with distinct
    //! integer coordinates and compares it with the collapsed polynomial.
    //! A wrong polynomial agrees at a random point only if the point lies on
    //! a fixed proper hypersurface, which has negligible probability.

    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use rand::seq::SliceRandom;

    use super::Permutation;
    use crate::algebra::LaurentPoly;

    pub(super) fn check_at_random_point<F>(perms: &[Permutation], numerator_of: &F, result: &LaurentPoly)
    where
        F: Fn(&Permutation) -> LaurentPoly,
    {
        let nvars = result.nvars();
        if perms.len() > 720 {
            return;
        }
        let mut rng = rand::thread_rng();
        let mut pool: Vec<i64> = (2..40).collect();
        pool.shuffle(&mut rng);
        let point: Vec<BigRational> = pool[..nvars]
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        let inv = |x: &BigRational| x.recip();
        let mut raw = BigRational::zero();
        for sigma in perms {
            let num = numerator_of(sigma);
            if num.is_zero() {
                continue;
            }
            let mut den = BigRational::one();
            for (a, b) in sigma.consecutive_pairs() {
                den *= BigRational::one() - &point[b - 1] / &point[a - 1];
            }
            raw += num.eval_with(&point, inv) / den;
        }
        let collapsed = result.eval_with(&point, inv);
        assert_eq!(raw, collapsed, "localization collapse disagrees with the rational sum");
    }
}
