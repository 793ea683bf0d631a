//! Argument reduction and compensated summation for exponential sums.
//!
//! Every term of a Dirichlet polynomial is `c * exp(i * t * phi)`. With
//! `|t * phi|` as large as `1e15` the naive product already loses the whole
//! fractional part of the angle, so the product is formed exactly (FMA
//! two-product) and reduced against a triple-double `2*pi`.

use num_complex::Complex64;

const TWO_PI: [f64; 3] = [
    std::f64::consts::TAU,
    2.449_293_598_294_706_4e-16,
    -5.989_539_619_436_679e-33,
];

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `t * phi` reduced modulo `2*pi` into roughly `[-pi, pi]`, with absolute
/// error a few ulps of `pi` for `|t * phi| < 2^52`.
#[inline]
pub fn reduced_angle(t: f64, phi: f64) -> f64 {
    let (p, e) = two_prod(t, phi);
    if p.abs() <= std::f64::consts::PI {
        return p + e;
    }
    let k = (p / TWO_PI[0]).round();
    let (m0, m0e) = two_prod(k, TWO_PI[0]);
    // p and m0 are within a factor of two of each other, so this is exact.
    let head = p - m0;
    let (s, err) = two_sum(head, e - m0e);
    let tail = err - k * TWO_PI[1] - k * TWO_PI[2];
    s + tail
}

/// `exp(i * t * phi)` with the angle reduced as in [`reduced_angle`].
#[inline]
pub fn cis(t: f64, phi: f64) -> Complex64 {
    let (s, c) = reduced_angle(t, phi).sin_cos();
    Complex64::new(c, s)
}

#[inline]
pub fn cis_angle(angle: f64) -> Complex64 {
    let (s, c) = angle.sin_cos();
    Complex64::new(c, s)
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: f64,
    im: f64,
    re_c: f64,
    im_c: f64,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        let (s, e) = two_sum(self.re, z.re);
        self.re = s;
        self.re_c += e;
        let (s, e) = two_sum(self.im, z.im);
        self.im = s;
        self.im_c += e;
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Pairwise (tree) summation; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
