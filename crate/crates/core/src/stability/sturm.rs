//! Exact real-root counting over the rationals: square-free decomposition
//! (Yun) followed by a Sturm sequence on each factor.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn degree(p: &Poly) -> usize {
    p.len().saturating_sub(1)
}

fn is_constant(p: &Poly) -> bool {
    p.len() <= 1
}

fn derivative(p: &Poly) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
            .collect(),
    )
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

/// Long division `a = q b + r`, `b` nonzero.
fn div_rem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = degree(b);
    let lead = b.last().expect("division by the zero polynomial").clone();
    let mut rem = a.clone();
    if rem.len() < b.len() {
        return (Vec::new(), trim(rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let factor = rem.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            rem[shift + i] -= &factor * c;
        }
        quot[shift] = factor;
        rem.pop();
        rem = trim(rem);
    }
    (trim(quot), rem)
}

/// Scales by `1 / |leading coefficient|`; keeps every sign.
fn normalize(p: Poly) -> Poly {
    match p.last() {
        Some(lead) => {
            let s = lead.abs();
            p.iter().map(|c| c / &s).collect()
        }
        None => p,
    }
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (normalize(a.clone()), normalize(b.clone()));
    while !b.is_empty() {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = normalize(r);
    }
    a
}

fn exact_div(a: &Poly, b: &Poly) -> Poly {
    let (q, r) = div_rem(a, b);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

/// Yun's square-free decomposition: `(factor, multiplicity)` pairs with
/// nonconstant, pairwise coprime, square-free factors.
fn square_free(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let df = derivative(f);
    let a0 = gcd(f, &df);
    let mut b = exact_div(f, &a0);
    let mut c = exact_div(&df, &a0);
    let mut d = sub(&c, &derivative(&b));
    let mut i = 1;
    while !is_constant(&b) {
        let a = gcd(&b, &d);
        if !is_constant(&a) {
            out.push((a.clone(), i));
        }
        b = exact_div(&b, &a);
        c = exact_div(&d, &a);
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

fn sign_at_infinity(p: &Poly, negative: bool) -> i32 {
    let lead = p.last().expect("empty polynomial in Sturm chain");
    let s = if lead.is_positive() { 1 } else { -1 };
    if negative && degree(p) % 2 == 1 {
        -s
    } else {
        s
    }
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut count = 0;
    let mut prev = 0;
    for s in signs.filter(|s| *s != 0) {
        if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// Number of distinct real roots of a square-free polynomial.
fn sturm_count(f: &Poly) -> usize {
    let mut chain = vec![normalize(f.clone()), normalize(derivative(f))];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let (_, r) = div_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(normalize(r.iter().map(|c| -c).collect()));
    }
    let at_neg = variations(chain.iter().map(|p| sign_at_infinity(p, true)));
    let at_pos = variations(chain.iter().map(|p| sign_at_infinity(p, false)));
    at_neg - at_pos
}

/// Real roots counted with multiplicity, for integer coefficients in
/// ascending degree. The polynomial must be nonzero.
pub(crate) fn real_root_count(coeffs: &[BigInt]) -> usize {
    let f: Poly = trim(
        coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    );
    debug_assert!(!f.is_empty());
    if is_constant(&f) {
        return 0;
    }
    square_free(&f)
        .iter()
        .map(|(factor, mult)| mult * sturm_count(factor))
        .sum()
}

/// Degree of the product of all square-free parts, i.e. the number of distinct complex roots.
#[cfg(test)]
fn distinct_roots(coeffs: &[i64]) -> usize {
    let f: Poly = coeffs
        .iter()
        .map(|c| BigRational::from_integer(BigInt::from(*c)))
        .collect();
    square_free(&trim(f)).iter().map(|(p, _)| degree(p)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(c: &[i64]) -> usize {
        real_root_count(&c.iter().map(|x| BigInt::from(*x)).collect::<Vec<_>>())
    }

    #[test]
    fn simple_cases() {
        assert_eq!(count(&[1, 3, 3, 1]), 3);
        assert_eq!(count(&[1, 0, 1]), 0);
        assert_eq!(count(&[-1, 0, 1]), 2);
        assert_eq!(count(&[0, 0, 1]), 2);
        assert_eq!(count(&[5]), 0);
        assert_eq!(count(&[1, 16, 36, 16, 1]), 4);
    }

    #[test]
    fn multiplicities_are_counted() {
        // (z+1)^2 (z^2+1) = z^4 + 2z^3 + 2z^2 + 2z + 1
        assert_eq!(count(&[1, 2, 2, 2, 1]), 2);
        assert_eq!(distinct_roots(&[1, 2, 2, 2, 1]), 3);
        // (z-2)^3 (z+1)^2
        assert_eq!(count(&[-8, -4, 10, 1, -4, 1]), 5);
        // z^3 (z^2 + z + 1)
        assert_eq!(count(&[0, 0, 0, 1, 1, 1]), 3);
    }

    #[test]
    fn square_free_of_binomial_power() {
        let f: Vec<i64> = vec![1, 6, 15, 20, 15, 6, 1];
        assert_eq!(distinct_roots(&f), 1);
        assert_eq!(count(&f), 6);
    }
}
