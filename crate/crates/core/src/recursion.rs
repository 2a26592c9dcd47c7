//! Euler characteristics by restriction to a boundary divisor.
//!
//! Restricting `A_{n,i} ⊗ F` to `Gamma_i = sum_{i in S} D_S` turns the
//! computation into a signed sum over flags of boundary strata. Each stratum
//! `D_{S_1..S_k}` is a product of permutohedral varieties; `A` restricts to
//! the factor on `E \ S_k` and `B` to the factor on `S_1`, so only the head
//! and tail of a flag matter. Counting flags with a given head and tail by
//! ordered set partitions collapses the alternating sum to
//!
//! ```text
//! sum_{i in S ⊊ E} A(E\S) B(S) + sum_{i in S ⊊ S' ⊊ E} (-1)^{|S'\S|} A(E\S') B(S)
//! ```
//!
//! The factor values come from memoized `chi(A^a)` on `X_m` in canonical
//! variables `u_1..u_{m+1}`, moved onto the factor's coordinates and
//! twisted by the linearization characters.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, factorial, stirling2_flag, ExponentVec, JsonTerm, LaurentPoly};
use crate::error::{Error, Result};
use crate::lattice::check_chi_args;

/// Largest dimension accepted by the recursion.
pub const MAX_DIM: usize = 12;

/// Ordered global variable indices (1-based) of a permutohedral factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSet(Vec<usize>);

impl VarSet {
    pub fn new(vars: Vec<usize>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::arg("a factor needs at least one coordinate"));
        }
        let mut seen = vars.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != vars.len() || seen[0] == 0 {
            return Err(Error::arg(format!("{vars:?} is not a set of variable indices")));
        }
        Ok(VarSet(vars))
    }

    /// Elements of a non-empty bitmask in increasing order.
    pub fn from_mask(mask: u32) -> Self {
        assert!(mask != 0);
        VarSet((0..32).filter(|h| mask >> h & 1 == 1).map(|h| h + 1).collect())
    }

    /// Dimension of the factor, `|V| - 1`.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MemoKind {
    /// `chi_{X_m}(A_m^e)`
    #[serde(rename = "F_A")]
    FA,
    /// `chi_{X_m}(O(-e Gamma))`
    #[serde(rename = "G_A")]
    GA,
}

type MemoKey = (MemoKind, usize, usize);

/// Memoized factor values in canonical variables. Values never change once
/// stored; concurrent inserts of the same key must carry the same value.
#[derive(Debug, Default)]
pub struct MemoStore {
    map: RwLock<HashMap<MemoKey, LaurentPoly>>,
}

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    entries: Vec<CacheEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    kind: MemoKind,
    m: usize,
    e: usize,
    terms: Vec<JsonTerm>,
}

impl MemoStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: MemoKind, m: usize, e: usize) -> Option<LaurentPoly> {
        self.map.read().get(&(kind, m, e)).cloned()
    }

    /// Inserts unless present. Returns the stored value.
    pub fn insert(&self, kind: MemoKind, m: usize, e: usize, value: LaurentPoly) -> LaurentPoly {
        assert_eq!(value.nvars(), m + 1, "memo values live in m+1 canonical variables");
        let mut map = self.map.write();
        let stored = map.entry((kind, m, e)).or_insert(value);
        stored.clone()
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        let map = self.map.read();
        let mut keys: Vec<&MemoKey> = map.keys().collect();
        keys.sort();
        let entries = keys
            .into_iter()
            .map(|k| CacheEntry {
                kind: k.0,
                m: k.1,
                e: k.2,
                terms: map[k].to_json_terms(),
            })
            .collect();
        serde_json::to_string(&CacheFile {
            version: CACHE_VERSION,
            entries,
        })
        .expect("cache entries serialize")
    }

    /// Parses and validates a cache: version, exponent lengths, non-zero
    /// coefficients, and no repeated keys or monomials.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: CacheFile = serde_json::from_str(s).map_err(|e| Error::Cache(e.to_string()))?;
        if file.version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {}", file.version)));
        }
        let mut map = HashMap::new();
        for entry in file.entries {
            if entry.m > MAX_DIM {
                return Err(Error::Cache(format!("dimension {} too large", entry.m)));
            }
            let mut seen = std::collections::HashSet::new();
            for t in &entry.terms {
                if !seen.insert(&t.exp) {
                    return Err(Error::Cache(format!("repeated monomial {:?}", t.exp)));
                }
                let c = crate::algebra::coeff_from_json(&t.c).map_err(|e| Error::Cache(e.to_string()))?;
                if c.is_zero() {
                    return Err(Error::Cache("stored zero coefficient".into()));
                }
            }
            let poly = LaurentPoly::from_json_terms(entry.m + 1, &entry.terms)
                .map_err(|e| Error::Cache(format!("{:?} m={} e={}: {e}", entry.kind, entry.m, entry.e)))?;
            if map.insert((entry.kind, entry.m, entry.e), poly).is_some() {
                return Err(Error::Cache(format!(
                    "repeated key {:?} m={} e={}",
                    entry.kind, entry.m, entry.e
                )));
            }
        }
        Ok(MemoStore {
            map: RwLock::new(map),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }
}

/// Recursive evaluator backed by a [`MemoStore`].
#[derive(Debug, Default)]
pub struct Recursion {
    memo: MemoStore,
}

fn full_mask(nvars: usize) -> u32 {
    (1u32 << nvars) - 1
}

/// Non-empty submasks of `mask`.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut sub = mask;
    let mut done = mask == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = sub;
        sub = (sub - 1) & mask;
        done = sub == 0;
        Some(cur)
    })
}

fn sign(exp: u32) -> BigInt {
    if exp.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Collapsed weight of a proper superset `sup` of `sub`: `(-1)^{|sup \ sub|}`.
fn collapse_weight(sub: u32, sup: u32) -> BigInt {
    sign((sup & !sub).count_ones())
}

impl Recursion {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store(memo: MemoStore) -> Self {
        Recursion { memo }
    }

    pub fn store(&self) -> &MemoStore {
        &self.memo
    }

    pub fn into_store(self) -> MemoStore {
        self.memo
    }

    /// `chi_{X_m}(A_m^a)` in canonical variables, where
    /// `[O(-Gamma)]` has fiber `u_{tau(m+1)}` at the fixed point `tau`.
    ///
    /// With pivot `u_1`, restriction gives
    /// `P = chi(A_{m,1} ⊗ A_m^{a-1})` from factors of dimension `< m`.
    /// Since `A_{m,1} = [O] - u_1^{-1}[O(-Gamma)]` and
    /// `A_m = [O] - [O(-Gamma)]`, the untwisted value is
    /// `f(m,a) = f(m,a-1) - u_1 (f(m,a-1) - P)`.
    pub fn f_a(&self, m: usize, a: usize) -> LaurentPoly {
        if let Some(v) = self.memo.get(MemoKind::FA, m, a) {
            return v;
        }
        let nv = m + 1;
        let value = if a == 0 {
            LaurentPoly::one(nv)
        } else if m == 0 {
            (&LaurentPoly::one(1) - &LaurentPoly::var(1, 1)).pow(a as u32)
        } else {
            let full = full_mask(nv);
            let mut p = LaurentPoly::zero(nv);
            // every S' containing the pivot collects its own k=1 term plus
            // the collapsed weights of all S ⊊ S' containing the pivot
            for sup in (1..full).filter(|s| s & 1 == 1) {
                let mut w = BigInt::one();
                for sub in submasks(sup & !1) {
                    if sub != sup & !1 {
                        w += collapse_weight(sub | 1, sup);
                    }
                }
                if sup != 1 {
                    w += collapse_weight(1, sup);
                }
                if w.is_zero() {
                    continue;
                }
                let rest = VarSet::from_mask(full ^ sup);
                let factor = self.f_a(rest.dim(), a - 1).embed(rest.as_slice(), nv);
                p.add_scaled(&factor, &w);
            }
            let prev = self.f_a(m, a - 1);
            let u1 = ExponentVec::unit(nv, 1);
            &prev - &(&prev - &p).mul_monomial(&u1, &BigInt::one())
        };
        self.memo.insert(MemoKind::FA, m, a, value)
    }

    /// `chi_{X_m}(O(-k Gamma)) = sum_r (-1)^r C(k,r) f_A(m,r)`.
    pub fn g_a(&self, m: usize, k: usize) -> LaurentPoly {
        if let Some(v) = self.memo.get(MemoKind::GA, m, k) {
            return v;
        }
        let mut g = LaurentPoly::zero(m + 1);
        for r in 0..=k {
            g.add_scaled(&self.f_a(m, r), &(sign(r as u32) * binomial(k, r)));
        }
        self.memo.insert(MemoKind::GA, m, k, g)
    }

    /// `chi_{X_m}(O(-l Delta))`, fiber `u_{tau(1)}^{-1}` per unit; the
    /// Cremona involution makes it the dual of `g_A`.
    pub fn g_b(&self, m: usize, l: usize) -> LaurentPoly {
        self.g_a(m, l).dualize()
    }

    /// `chi(([O] - t_i^{-1}[O(-Gamma)])^a)` on the factor with coordinates
    /// `vars`, in `nvars` global variables.
    pub fn chi_twisted_a(&self, vars: &VarSet, i: usize, a: usize, nvars: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(nvars);
        for k in 0..=a {
            let g = self.g_a(vars.dim(), k);
            if g.is_zero() {
                continue;
            }
            let mut twist = ExponentVec::zero(nvars);
            twist.as_mut_slice()[i - 1] = -(k as i32);
            let c = sign(k as u32) * binomial(a, k);
            out += &g.embed(vars.as_slice(), nvars).mul_monomial(&twist, &c);
        }
        out
    }

    /// `chi(([O] - t_j [O(-Delta)])^b)` on the factor with coordinates `vars`.
    pub fn chi_twisted_b(&self, vars: &VarSet, j: usize, b: usize, nvars: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(nvars);
        for l in 0..=b {
            let g = self.g_b(vars.dim(), l);
            if g.is_zero() {
                continue;
            }
            let mut twist = ExponentVec::zero(nvars);
            twist.as_mut_slice()[j - 1] = l as i32;
            let c = sign(l as u32) * binomial(b, l);
            out += &g.embed(vars.as_slice(), nvars).mul_monomial(&twist, &c);
        }
        out
    }

    /// Factor pair for a stratum with head `head` and tail `tail`:
    /// `A`-part on `E \ tail`, `B`-part on `head`.
    fn stratum_setup(&self, i: usize, j: usize, a: usize, n: usize) -> Stratum {
        let nvars = n + 1;
        let full = full_mask(nvars);
        if a > 0 {
            Stratum {
                nvars,
                full,
                a_exp: a - 1,
                b_exp: n - a,
                allowed: Box::new(move |s| s >> (i - 1) & 1 == 1),
            }
        } else {
            // restriction to Delta_j: flags avoid j
            Stratum {
                nvars,
                full,
                a_exp: 0,
                b_exp: n - 1,
                allowed: Box::new(move |s| s >> (j - 1) & 1 == 0),
            }
        }
    }

    fn factor_tables(&self, st: &Stratum, i: usize, j: usize) -> (HashMap<u32, LaurentPoly>, HashMap<u32, LaurentPoly>) {
        let masks: Vec<u32> = (1..st.full).filter(|&s| (st.allowed)(s)).collect();
        let a_part = masks
            .par_iter()
            .map(|&s| (s, self.chi_twisted_a(&VarSet::from_mask(st.full ^ s), i, st.a_exp, st.nvars)))
            .collect();
        let b_part = masks
            .par_iter()
            .map(|&s| (s, self.chi_twisted_b(&VarSet::from_mask(s), j, st.b_exp, st.nvars)))
            .collect();
        (a_part, b_part)
    }

    /// `chi_T(A_{n,i}^a ⊗ B_{n,j}^{n-a})` by the collapsed two-sum formula.
    /// `a > 0` restricts to `Gamma_i`, `a = 0` to `Delta_j`.
    pub fn chi_recursive(&self, i: usize, j: usize, a: usize, n: usize) -> Result<LaurentPoly> {
        check_args(i, j, a, n)?;
        if n == 0 {
            return Ok(LaurentPoly::one(1));
        }
        let st = self.stratum_setup(i, j, a, n);
        let (a_part, b_part) = self.factor_tables(&st, i, j);
        let heads: Vec<u32> = (1..st.full).filter(|&s| (st.allowed)(s)).collect();
        let partials: Vec<LaurentPoly> = heads
            .par_iter()
            .map(|&head| {
                let mut inner = a_part[&head].clone();
                let free = st.full ^ head;
                for extra in submasks(free) {
                    let tail = head | extra;
                    if tail == st.full || !(st.allowed)(tail) {
                        continue;
                    }
                    inner.add_scaled(&a_part[&tail], &collapse_weight(head, tail));
                }
                &b_part[&head] * &inner
            })
            .collect();
        let mut total = LaurentPoly::zero(st.nvars);
        for p in &partials {
            total += p;
        }
        Ok(total)
    }

    /// The same sum before collapsing: pairs `(S_1, S_k)` weighted by
    /// `(-1)^{k+1} (k-1)! {|S_k \ S_1| over k-1}` summed over flag lengths.
    pub fn chi_recursive_stirling(&self, i: usize, j: usize, a: usize, n: usize) -> Result<LaurentPoly> {
        check_args(i, j, a, n)?;
        if n == 0 {
            return Ok(LaurentPoly::one(1));
        }
        let st = self.stratum_setup(i, j, a, n);
        let (a_part, b_part) = self.factor_tables(&st, i, j);
        let mut total = LaurentPoly::zero(st.nvars);
        for head in (1..st.full).filter(|&s| (st.allowed)(s)) {
            total += &(&b_part[&head] * &a_part[&head]);
            for extra in submasks(st.full ^ head) {
                let tail = head | extra;
                if tail == st.full || !(st.allowed)(tail) {
                    continue;
                }
                let span = extra.count_ones() as usize;
                let w = flag_weight(n, span);
                if !w.is_zero() {
                    total.add_scaled(&(&b_part[&head] * &a_part[&tail]), &w);
                }
            }
        }
        Ok(total)
    }
}

struct Stratum {
    nvars: usize,
    full: u32,
    a_exp: usize,
    b_exp: usize,
    allowed: Box<dyn Fn(u32) -> bool + Send + Sync>,
}

fn check_args(i: usize, j: usize, a: usize, n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::arg(format!("dimension {n} exceeds the recursion maximum {MAX_DIM}")));
    }
    check_chi_args(i, j, a, n)
}

fn shared() -> &'static Recursion {
    static ENGINE: OnceLock<Recursion> = OnceLock::new();
    ENGINE.get_or_init(Recursion::new)
}

/// [`Recursion::chi_recursive`] on a process-wide memo.
pub fn chi_recursive(i: usize, j: usize, a: usize, n: usize) -> Result<LaurentPoly> {
    shared().chi_recursive(i, j, a, n)
}

/// Total weight of the flags `S = S_1 ⊊ ... ⊊ S_k = S'` with `|S' \ S| = span`
/// on `X_n`, `sum_{k=2}^{n} (-1)^{k+1} (k-1)! {span over k-1}`.
pub fn flag_weight(n: usize, span: usize) -> BigInt {
    (2..=n.max(1))
        .map(|k| sign(k as u32 + 1) * factorial(k - 1) * stirling2_flag(span, k - 1))
        .sum()
}

/// Checks `sum_{k=1}^{s} (-1)^k k! S(s,k) = (-1)^s` for `s = span`, the
/// identity that collapses flag counts to the sign `(-1)^{|S' \ S|}`. When
/// the gap fits in `X_n` (`span <= n - 1`) the flag-length-bounded weight
/// is checked as well.
pub fn stirling_collapse_check(n: usize, span: usize) -> bool {
    if span == 0 {
        return false;
    }
    let expected = sign(span as u32);
    let plain: BigInt = (1..=span)
        .map(|k| sign(k as u32) * factorial(k) * stirling2_flag(span, k))
        .sum();
    plain == expected && (span >= n || flag_weight(n, span) == expected)
}
