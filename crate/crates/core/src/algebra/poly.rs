//! Sparse Laurent polynomials in `t_1, ..., t_N` with big-integer coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, so two polynomials
//! are equal exactly when their maps are equal. Zero coefficients are never
//! stored; the zero polynomial is the empty map.
//!
//! Variable indices in the public API are 1-based (`t1` is variable 1).

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exponent vector of a Laurent monomial. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVec(SmallVec<[i32; 8]>);

impl ExponentVec {
    pub fn zero(nvars: usize) -> Self {
        ExponentVec(SmallVec::from_elem(0, nvars))
    }

    pub fn from_slice(e: &[i32]) -> Self {
        ExponentVec(SmallVec::from_slice(e))
    }

    /// The exponent vector of `t_var` (1-based).
    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = Self::zero(nvars);
        e.0[var - 1] = 1;
        e
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [i32] {
        &mut self.0
    }

    /// Exponent of variable `var` (1-based).
    pub fn get(&self, var: usize) -> i32 {
        self.0[var - 1]
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn plus(&self, other: &ExponentVec) -> ExponentVec {
        ExponentVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn negated(&self) -> ExponentVec {
        ExponentVec(self.0.iter().map(|e| -e).collect())
    }
}

impl fmt::Debug for ExponentVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<i32>> for ExponentVec {
    fn from(v: Vec<i32>) -> Self {
        ExponentVec(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[i32; N]> for ExponentVec {
    fn from(v: [i32; N]) -> Self {
        ExponentVec::from_slice(&v)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<ExponentVec, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(ExponentVec::zero(nvars), c.into());
        p
    }

    /// `t_var` (1-based).
    pub fn var(nvars: usize, var: usize) -> Self {
        Self::monomial(ExponentVec::unit(nvars, var), 1)
    }

    /// Builds `coeff * t^exps`; the variable count is the length of `exps`.
    pub fn monomial(exps: ExponentVec, coeff: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, coeff.into());
        p
    }

    /// Like [`monomial`](Self::monomial) but checks the exponent length
    /// against an explicit variable count.
    pub fn from_monomial(nvars: usize, exps: ExponentVec, coeff: impl Into<BigInt>) -> Result<Self> {
        if exps.len() != nvars {
            return Err(Error::LengthMismatch {
                expected: nvars,
                got: exps.len(),
            });
        }
        Ok(Self::monomial(exps, coeff))
    }

    /// Collects terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVec, BigInt)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::LengthMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Same as [`is_zero`](Self::is_zero).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| e.is_zero() && c.is_one())
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVec, &BigInt)> + ExactSizeIterator {
        self.terms.iter()
    }

    /// Coefficient of `t^exps` (zero when absent).
    pub fn coeff(&self, exps: &ExponentVec) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, exps: ExponentVec, c: BigInt) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &LaurentPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.add_scaled(other, &BigInt::one());
        Ok(out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &LaurentPoly, c: &BigInt) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    fn mul_unchecked(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        if other.terms.len() == 1 {
            let (e, c) = other.terms.iter().next().unwrap();
            return self.mul_monomial(e, c);
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            return other.mul_monomial(e, c);
        }
        let mut acc: HashMap<ExponentVec, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let prod = ca * cb;
                match acc.entry(ea.plus(eb)) {
                    Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    Entry::Occupied(mut o) => *o.get_mut() += prod,
                }
            }
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `self * c * t^exps`.
    pub fn mul_monomial(&self, exps: &ExponentVec, c: &BigInt) -> LaurentPoly {
        assert_eq!(exps.len(), self.nvars, "variable count mismatch");
        if c.is_zero() {
            return LaurentPoly::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.plus(exps), v * c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        self.mul_monomial(&ExponentVec::zero(self.nvars), c)
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut out = LaurentPoly::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Negates every exponent: the representation dual, which is also the
    /// substitution `t -> t^{-1}`.
    pub fn dualize(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.negated(), c.clone()))
                .collect(),
        }
    }

    /// Moves variable `old` to position `varmap[old]` in a ring with
    /// `new_nvars` variables. Both sides of the map are 1-based.
    pub fn relabel(&self, varmap: &[(usize, usize)], new_nvars: usize) -> Result<LaurentPoly> {
        let mut target = vec![None; self.nvars];
        let mut used = vec![false; new_nvars];
        for &(old, new) in varmap {
            if old == 0 || old > self.nvars {
                return Err(Error::Relabel(format!("source variable {old} out of range")));
            }
            if new == 0 || new > new_nvars {
                return Err(Error::Relabel(format!("target variable {new} out of range")));
            }
            if target[old - 1].is_some() {
                return Err(Error::Relabel(format!("source variable {old} mapped twice")));
            }
            if used[new - 1] {
                return Err(Error::Relabel(format!("target variable {new} hit twice")));
            }
            target[old - 1] = Some(new - 1);
            used[new - 1] = true;
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = ExponentVec::zero(new_nvars);
            for (h, &x) in e.as_slice().iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match target[h] {
                    Some(t) => ne.0[t] = x,
                    None => {
                        return Err(Error::Relabel(format!(
                            "variable {} occurs but is not mapped",
                            h + 1
                        )))
                    }
                }
            }
            terms.insert(ne, c.clone());
        }
        Ok(LaurentPoly {
            nvars: new_nvars,
            terms,
        })
    }

    /// Transports a polynomial in canonical variables `u_1..u_{|vars|}` onto
    /// the global variables listed in `vars` (order-preserving).
    pub fn embed(&self, vars: &[usize], new_nvars: usize) -> LaurentPoly {
        let map: Vec<(usize, usize)> = vars.iter().enumerate().map(|(h, &v)| (h + 1, v)).collect();
        self.relabel(&map, new_nvars)
            .expect("embedding map must be injective and cover every variable")
    }

    /// Applies a permutation of the variables: `t_h -> t_{perm[h-1]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> LaurentPoly {
        let map: Vec<(usize, usize)> = perm.iter().enumerate().map(|(h, &v)| (h + 1, v)).collect();
        self.relabel(&map, self.nvars).expect("not a permutation")
    }

    /// Value at `t = (1, ..., 1)`: the sum of coefficients.
    pub fn eval_ones(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Evaluates at a point given by a caller-supplied field; `inv` must
    /// return the multiplicative inverse of a coordinate.
    pub fn eval_with<F, Inv>(&self, point: &[F], inv: Inv) -> F
    where
        F: Clone + Zero + One + for<'a> Mul<&'a F, Output = F> + From<BigInt>,
        Inv: Fn(&F) -> F,
    {
        assert_eq!(point.len(), self.nvars);
        let inverses: Vec<F> = point.iter().map(&inv).collect();
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut m = F::from(c.clone());
            for (h, &x) in e.as_slice().iter().enumerate() {
                let base = if x >= 0 { &point[h] } else { &inverses[h] };
                for _ in 0..x.unsigned_abs() {
                    m = m * base;
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Componentwise minimum exponent over all terms (zeros for the zero
    /// polynomial).
    pub fn min_exponents(&self) -> ExponentVec {
        let mut lo = ExponentVec::zero(self.nvars);
        for (i, e) in self.terms.keys().enumerate() {
            for (h, &x) in e.as_slice().iter().enumerate() {
                if i == 0 || x < lo.0[h] {
                    lo.0[h] = x;
                }
            }
        }
        lo
    }

    /// True when every term has the same total degree `d`.
    pub fn is_homogeneous_of_degree(&self, d: i64) -> bool {
        self.terms.keys().all(|e| e.degree() == d)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.nvars, self)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self -= &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        self.add_scaled(rhs, &BigInt::one());
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        self.add_scaled(rhs, &-BigInt::one());
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(n: usize, h: usize) -> LaurentPoly {
        LaurentPoly::var(n, h)
    }

    fn one(n: usize) -> LaurentPoly {
        LaurentPoly::one(n)
    }

    #[test]
    fn monomial_construction() {
        let c = LaurentPoly::from_monomial(4, [0, 0, 0, 0].into(), 1).unwrap();
        assert!(c.is_one());

        let m = LaurentPoly::from_monomial(4, [-2, 1, 1, 0].into(), 1).unwrap();
        assert_eq!(m.to_string(), "t1^-2*t2*t3");

        let z = LaurentPoly::from_monomial(2, [1, 0].into(), 0).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.len(), 0);

        assert_eq!(
            LaurentPoly::from_monomial(3, [1, 0].into(), 1),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn addition() {
        assert!((&t(1, 1) + &(-t(1, 1))).is_zero());

        let p = LaurentPoly::from_terms(
            4,
            [
                (ExponentVec::from([0, 0, 0, 0]), BigInt::from(1)),
                (ExponentVec::from([-1, 1, 0, 0]), BigInt::from(-1)),
            ],
        )
        .unwrap();
        let q = LaurentPoly::from_terms(
            4,
            [
                (ExponentVec::from([-2, 2, 0, 0]), BigInt::from(1)),
                (ExponentVec::from([-2, 1, 1, 0]), BigInt::from(1)),
                (ExponentVec::from([-2, 1, 0, 1]), BigInt::from(1)),
            ],
        )
        .unwrap();
        let s = p.try_add(&q).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.eval_ones(), BigInt::from(3));

        assert_eq!(&p + &LaurentPoly::zero(4), p);
        assert_eq!(
            p.try_add(&one(3)),
            Err(Error::NvarsMismatch { left: 4, right: 3 })
        );
    }

    #[test]
    fn multiplication() {
        let a = &one(1) - &t(1, 1);
        let sq = &a * &a;
        let expected = &(&one(1) - &t(1, 1).scale(&BigInt::from(2))) + &t(1, 1).pow(2);
        assert_eq!(sq, expected);

        let n = 4;
        let x41 = LaurentPoly::monomial([-1, 0, 0, 1].into(), 1);
        let x21 = LaurentPoly::monomial([-1, 1, 0, 0].into(), 1);
        let prod = &(&one(n) - &x41) * &(&one(n) - &x21);
        let expected = LaurentPoly::from_terms(
            n,
            [
                (ExponentVec::from([0, 0, 0, 0]), BigInt::from(1)),
                (ExponentVec::from([-1, 1, 0, 0]), BigInt::from(-1)),
                (ExponentVec::from([-1, 0, 0, 1]), BigInt::from(-1)),
                (ExponentVec::from([-2, 1, 0, 1]), BigInt::from(1)),
            ],
        )
        .unwrap();
        assert_eq!(prod, expected);
        assert_eq!(&prod * &one(n), prod);
        assert!(prod.try_mul(&one(2)).is_err());
    }

    #[test]
    fn dualize_negates_exponents() {
        let m = LaurentPoly::monomial([1, -1, 0].into(), 1);
        assert_eq!(m.dualize(), LaurentPoly::monomial([-1, 1, 0].into(), 1));
        assert_eq!(one(3).dualize(), one(3));
    }

    #[test]
    fn relabel_moves_variables() {
        let p = &one(1) - &t(1, 1);
        let q = p.relabel(&[(1, 4)], 4).unwrap();
        assert_eq!(q, &one(4) - &t(4, 4));

        let r = LaurentPoly::monomial([2, -1, 3].into(), 5);
        assert_eq!(r.relabel(&[(1, 1), (2, 2), (3, 3)], 3).unwrap(), r);

        let u = LaurentPoly::monomial([1, -1].into(), 1);
        let moved = u.relabel(&[(1, 3), (2, 1)], 4).unwrap();
        assert_eq!(moved, LaurentPoly::monomial([-1, 0, 1, 0].into(), 1));
        // composing with the inverse placement returns to the start
        let back = moved.relabel(&[(3, 1), (1, 2), (2, 3), (4, 4)], 4).unwrap();
        assert_eq!(back, LaurentPoly::monomial([1, -1, 0, 0].into(), 1));
    }

    #[test]
    fn relabel_rejects_bad_maps() {
        let u = LaurentPoly::monomial([1, -1].into(), 1);
        assert!(matches!(u.relabel(&[(1, 1), (2, 1)], 2), Err(Error::Relabel(_))));
        assert!(matches!(u.relabel(&[(1, 1)], 2), Err(Error::Relabel(_))));
        assert!(matches!(u.relabel(&[(1, 3), (2, 1)], 2), Err(Error::Relabel(_))));
        // unused variables need no image
        let v = LaurentPoly::monomial([1, 0].into(), 1);
        assert!(v.relabel(&[(1, 2)], 2).is_ok());
    }

    #[test]
    fn eval_at_ones() {
        assert_eq!(LaurentPoly::zero(3).eval_ones(), BigInt::zero());
        let mut p = LaurentPoly::constant(4, -1);
        for h in 1..=4 {
            p += &t(4, h);
        }
        assert_eq!(p.eval_ones(), BigInt::from(3));
    }

    #[test]
    fn min_exponents_and_degree() {
        let p = &LaurentPoly::monomial([-2, 1, 1, 0].into(), 1) + &LaurentPoly::monomial([0, -1, 0, 1].into(), 3);
        assert_eq!(p.min_exponents(), ExponentVec::from([-2, -1, 0, 0]));
        assert!(p.is_homogeneous_of_degree(0));
        assert!(!(&p + &t(4, 1)).is_homogeneous_of_degree(0));
    }
}
