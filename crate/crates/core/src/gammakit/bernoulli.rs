use rug::{Integer, Rational};

use crate::exactnum::poly::RatPoly;

/// `B_0..=B_m` with `B_1 = -1/2`.
pub fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    b.push(Rational::from(1));
    for j in 1..=m {
        if j > 1 && j % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        // Σ_{k<=j} binom(j+1, k) B_k = 0
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            if *bk != 0 {
                acc += Rational::from(bk * &binom);
            }
            binom *= (j + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        b.push(-acc / Rational::from(j as u32 + 1));
    }
    b
}

/// `B_m(x)` as a polynomial, ascending powers.
pub fn bernoulli_polynomial(m: usize, numbers: &[Rational]) -> RatPoly {
    let mut out = vec![Rational::new(); m + 1];
    let mut binom = Integer::from(1);
    for j in 0..=m {
        // coefficient of x^{m-j} is binom(m, j) B_j
        out[m - j] = Rational::from(&numbers[j] * &binom);
        binom *= (m - j) as u32;
        binom /= (j + 1) as u32;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::poly;
    use rug::ops::Pow;

    #[test]
    fn first_numbers() {
        let b = bernoulli_numbers(12);
        let want = [
            (1, 1), (-1, 2), (1, 6), (0, 1), (-1, 30), (0, 1), (1, 42),
            (0, 1), (-1, 30), (0, 1), (5, 66), (0, 1), (-691, 2730),
        ];
        for (x, w) in b.iter().zip(want) {
            assert_eq!(*x, Rational::from(w));
        }
    }

    #[test]
    fn polynomial_identities() {
        let b = bernoulli_numbers(10);
        for m in 0..=10 {
            let p = bernoulli_polynomial(m, &b);
            // B_m(0) = B_m and B_m(x+1) - B_m(x) = m x^{m-1}
            assert_eq!(poly::eval(&p, &Rational::new()), b[m]);
            for x in [Rational::from((1, 3)), Rational::from(2)] {
                let lhs = poly::eval(&p, &(x.clone() + 1u32)) - poly::eval(&p, &x);
                let rhs = if m == 0 {
                    Rational::new()
                } else {
                    Rational::from(m as u32) * x.clone().pow(m as i32 - 1)
                };
                assert_eq!(lhs, rhs, "m = {m}");
            }
        }
    }
}
