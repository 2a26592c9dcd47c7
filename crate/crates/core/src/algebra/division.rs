use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use super::poly::{ExponentVec, LaurentPoly};
use crate::error::{DivisionError, Error, Result};

/// Exact quotient `p / (t_a - t_b)` in the Laurent ring.
///
/// Synthetic division along `t_a`: with `p = sum_e c_e t_a^e`, the quotient
/// coefficients satisfy `q_{e-1} = c_e + t_b q_e`, eliminated from the top
/// `t_a`-degree down. Whatever is left at the bottom degree is the remainder,
/// which must vanish identically.
pub fn exact_div_binomial(p: &LaurentPoly, a: usize, b: usize) -> Result<LaurentPoly> {
    let n = p.nvars();
    if a == b || a == 0 || b == 0 || a > n || b > n {
        return Err(Error::arg(format!(
            "cannot divide by t{a} - t{b} in {n} variables"
        )));
    }
    if p.is_zero() {
        return Ok(LaurentPoly::zero(n));
    }

    let mut slices: BTreeMap<i32, LaurentPoly> = BTreeMap::new();
    for (e, c) in p.terms() {
        let deg = e.get(a);
        let mut rest = e.clone();
        rest.as_mut_slice()[a - 1] = 0;
        slices
            .entry(deg)
            .or_insert_with(|| LaurentPoly::zero(n))
            .add_term(rest, c.clone());
    }
    let lo = *slices.keys().next().unwrap();
    let hi = *slices.keys().next_back().unwrap();

    let tb = ExponentVec::unit(n, b);
    let one = BigInt::one();
    let mut quotient = LaurentPoly::zero(n);
    let mut carry = LaurentPoly::zero(n);
    for deg in (lo + 1..=hi).rev() {
        // carry holds q_deg; produce q_{deg-1}
        let mut next = carry.mul_monomial(&tb, &one);
        if let Some(c) = slices.get(&deg) {
            next += c;
        }
        let mut shift = ExponentVec::zero(n);
        shift.as_mut_slice()[a - 1] = deg - 1;
        quotient += &next.mul_monomial(&shift, &one);
        carry = next;
    }
    let mut remainder = carry.mul_monomial(&tb, &one);
    if let Some(c) = slices.get(&lo) {
        remainder += c;
    }
    if !remainder.is_zero() {
        let mut shift = ExponentVec::zero(n);
        shift.as_mut_slice()[a - 1] = lo;
        return Err(DivisionError {
            a,
            b,
            remainder: remainder.mul_monomial(&shift, &one),
        }
        .into());
    }
    Ok(quotient)
}

/// `t_a - t_b` as a polynomial.
pub fn binomial(nvars: usize, a: usize, b: usize) -> LaurentPoly {
    &LaurentPoly::var(nvars, a) - &LaurentPoly::var(nvars, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(h: usize) -> LaurentPoly {
        LaurentPoly::var(3, h)
    }

    #[test]
    fn difference_of_squares() {
        let p = &t(1).pow(2) - &t(2).pow(2);
        let q = exact_div_binomial(&p, 1, 2).unwrap();
        assert_eq!(q, &t(1) + &t(2));
    }

    #[test]
    fn nonzero_remainder_is_reported() {
        let p = &t(1) - &t(3);
        match exact_div_binomial(&p, 1, 2) {
            Err(Error::Division(d)) => {
                assert_eq!((d.a, d.b), (1, 2));
                // t1 - t3 = 1*(t1 - t2) + (t2 - t3)
                assert_eq!(d.remainder, &t(2) - &t(3));
            }
            other => panic!("expected division error, got {other:?}"),
        }
    }

    #[test]
    fn laurent_inputs() {
        // (t1^-1 t2^2 - t1^-2 t2^3) = t1^-2 t2^2 (t1 - t2)
        let p = &LaurentPoly::monomial([-1, 2, 0].into(), 1) - &LaurentPoly::monomial([-2, 3, 0].into(), 1);
        let q = exact_div_binomial(&p, 1, 2).unwrap();
        assert_eq!(q, LaurentPoly::monomial([-2, 2, 0].into(), 1));
        // dividing along the other variable gives the negated quotient
        let q2 = exact_div_binomial(&p, 2, 1).unwrap();
        assert_eq!(q2, -q);
    }

    #[test]
    fn projective_line_square() {
        // (1-t2)^2 t1 / (t1-t2) + (1-t1)^2 t2 / (t2-t1)
        let n = 2;
        let one = LaurentPoly::one(n);
        let t1 = LaurentPoly::var(n, 1);
        let t2 = LaurentPoly::var(n, 2);
        let num = &(&(&one - &t2).pow(2) * &t1) - &(&(&one - &t1).pow(2) * &t2);
        let q = exact_div_binomial(&num, 1, 2).unwrap();
        assert_eq!(q, &one - &(&t1 * &t2));
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(exact_div_binomial(&t(1), 1, 1), Err(Error::Argument(_))));
        assert!(matches!(exact_div_binomial(&t(1), 1, 4), Err(Error::Argument(_))));
        assert!(exact_div_binomial(&LaurentPoly::zero(3), 1, 2).unwrap().is_zero());
    }
}
