//! Double-double arithmetic (about 32 significant digits).
//!
//! The Hankel bounds of the moment space lose roughly `log10(cond)` digits;
//! carrying them in double-double keeps the canonical moments of a 12-moment
//! vector accurate to double precision.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Exact product of two doubles.
    pub fn prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.3190468138462996e-17,
    };

    /// Multiplication by `2^k`, exact barring overflow and underflow.
    fn ldexp(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn exp(self) -> Dd {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = (self - Self::LN2 * Dd::from(k)).ldexp(-10);
        // Taylor series of e^r - 1 with |r| < 2^-10.
        let mut term = r;
        let mut sum = r;
        for inv in INV_2_TO_9 {
            term = term * r * inv;
            sum = sum + term;
        }
        // (1 + s)^2 - 1 = s (2 + s), keeping the small part separate.
        for _ in 0..10 {
            sum = sum * (Dd::from(2.0) + sum);
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    /// Natural logarithm of a positive value, by one Newton step on `exp`.
    pub fn ln(self) -> Dd {
        let y = Dd::from(self.hi.ln());
        y + self * (-y).exp() - Dd::ONE
    }

    /// `self^e` for positive `self`.
    pub fn powd(self, e: Dd) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        (e * self.ln()).exp()
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        let r = (self - Dd::prod(s, s)).to_f64();
        let (hi, lo) = quick_two_sum(s, r / (2.0 * s));
        Dd { hi, lo }
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

/// `1/2, 1/3, ..., 1/9`.
const INV_2_TO_9: [Dd; 8] = [
    Dd { hi: 0.5, lo: 0.0 },
    Dd {
        hi: 0.3333333333333333,
        lo: 1.850371707708594e-17,
    },
    Dd { hi: 0.25, lo: 0.0 },
    Dd {
        hi: 0.2,
        lo: -1.1102230246251566e-17,
    },
    Dd {
        hi: 0.16666666666666666,
        lo: 9.25185853854297e-18,
    },
    Dd {
        hi: 0.14285714285714285,
        lo: 7.93016446160826e-18,
    },
    Dd { hi: 0.125, lo: 0.0 },
    Dd {
        hi: 0.1111111111111111,
        lo: 6.1679056923619804e-18,
    },
];

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    pub fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn div_real(self, s: Dd) -> Cdd {
        Cdd {
            re: self.re / s,
            im: self.im / s,
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_digits() {
        let third = Dd::ONE / Dd::from(3.0);
        let back = third * Dd::from(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let big = Dd::from(1e16) + Dd::ONE - Dd::from(1e16);
        assert_eq!(big.to_f64(), 1.0);
    }

    #[test]
    fn exp_and_ln() {
        let e = Dd::ONE.exp();
        assert_eq!(e.hi(), std::f64::consts::E);
        assert!((e.ln() - Dd::ONE).to_f64().abs() < 1e-30);
        let third = Dd::ONE / Dd::from(3.0);
        let cube_root = Dd::from(2.0).powd(third);
        let back = cube_root * cube_root * cube_root - Dd::from(2.0);
        assert!(back.to_f64().abs() < 1e-30, "{back:?}");
        assert!(Dd::from(-800.0).exp().to_f64() == 0.0);
        let tiny = Dd::from(1e-300);
        assert!(((tiny.ln().to_f64() + 690.7755278982137) / 690.0).abs() < 1e-16);
    }

    #[test]
    fn square_root() {
        let two = Dd::from(2.0).sqrt();
        assert!((two * two - Dd::from(2.0)).to_f64().abs() < 1e-30);
        assert_eq!(Dd::ZERO.sqrt(), Dd::ZERO);
    }

    #[test]
    fn complex_product() {
        let a = Cdd::from(Complex64::new(1.0, 2.0));
        let b = Cdd::from(Complex64::new(3.0, -1.0));
        assert_eq!((a * b).to_c64(), Complex64::new(5.0, 5.0));
        assert_eq!((a * a.conj()).to_c64(), Complex64::new(5.0, 0.0));
    }
}
