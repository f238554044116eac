use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::{Float, Rational};

/// Arbitrary-precision complex number built from two MPFR floats.
///
/// The precision of a value is the smaller of its two parts; binary
/// operations round their result to the smaller precision of the operands.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        let prec = re.prec().min(im.prec());
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        BigComplex {
            re,
            im: Float::new(prec),
        }
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        BigComplex::from_real(Float::with_val(prec, r))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    /// `e^{i theta}` for a real angle.
    pub fn from_polar(modulus: &Float, angle: &Float) -> Self {
        let prec = modulus.prec().min(angle.prec());
        let (s, c) = Float::with_val(prec, angle).sin_cos(Float::new(prec));
        BigComplex {
            re: Float::with_val(prec, &c * modulus),
            im: Float::with_val(prec, &s * modulus),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().min(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut a = Float::with_val(p, self.re.square_ref());
        a += Float::with_val(p, self.im.square_ref());
        a
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.hypot_ref(&self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec().min(s.prec());
        BigComplex {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        let d = self.norm_sqr();
        BigComplex {
            re: Float::with_val(p, &self.re / &d),
            im: Float::with_val(p, -Float::with_val(p, &self.im / &d)),
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        BigComplex::from_polar(&m, &self.im)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, self.abs().ln()),
            im: self.arg(),
        }
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec();
        let m = self.abs().sqrt();
        let half = Float::with_val(p, self.arg() / 2u32);
        BigComplex::from_polar(&m, &half)
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, e: i64) -> Self {
        let p = self.prec();
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = BigComplex::one(p);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `x^self` for a positive real `x`.
    pub fn real_base_pow(x: &Float, exponent: &BigComplex) -> Self {
        let p = exponent.prec().min(x.prec());
        let lx = Float::with_val(p, x.ln_ref());
        let arg = BigComplex {
            re: Float::with_val(p, &exponent.re * &lx),
            im: Float::with_val(p, &exponent.im * &lx),
        };
        arg.exp()
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }

    /// Decimal rendering with `digits` significant digits per part.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (
            float_to_string(&self.re, digits),
            float_to_string(&self.im, digits),
        )
    }
}

pub(crate) fn float_to_string(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Number of decimal digits carried by `prec` bits.
pub fn prec_digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).floor() as usize
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "BigComplex({re:e} + {im:e}i @{})", self.prec())
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = 20.min(prec_digits(self.prec()).max(1));
        let (re, im) = self.to_decimal(d);
        if self.im.is_sign_negative() && !self.im.is_zero() {
            write!(f, "{re} - {}i", im.trim_start_matches('-'))
        } else {
            write!(f, "{re} + {im}i")
        }
    }
}

impl<'a> Add<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().min(rhs.prec());
        BigComplex {
            re: Float::with_val(p, &self.re + &rhs.re),
            im: Float::with_val(p, &self.im + &rhs.im),
        }
    }
}

impl<'a> Sub<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().min(rhs.prec());
        BigComplex {
            re: Float::with_val(p, &self.re - &rhs.re),
            im: Float::with_val(p, &self.im - &rhs.im),
        }
    }
}

impl<'a> Mul<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().min(rhs.prec());
        let mut re = Float::with_val(p + 8, &self.re * &rhs.re);
        re -= Float::with_val(p + 8, &self.im * &rhs.im);
        let mut im = Float::with_val(p + 8, &self.re * &rhs.im);
        im += Float::with_val(p + 8, &self.im * &rhs.re);
        BigComplex {
            re: Float::with_val(p, re),
            im: Float::with_val(p, im),
        }
    }
}

impl<'a> Div<&'a BigComplex> for &'a BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        let p = self.prec().min(rhs.prec());
        let wide = rhs.with_prec(p + 8);
        let r = &self.with_prec(p + 8) * &wide.recip();
        r.with_prec(p)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}
