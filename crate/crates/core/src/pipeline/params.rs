use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::checks::{Basis, Check, CheckTag};
use crate::error::{Error, Result};
use crate::interval::Interval;

type Q = Ratio<i64>;

pub const H_MIN: u32 = 2;
pub const H_MAX: u32 = 8;
pub const DEFAULT_CQ: f64 = 1.0;
pub const DEFAULT_ALPHA_STAR: f64 = 0.5;

/// Fraction of the supremum used for the default `delta0`.
const DELTA0_FRACTION: f64 = 0.99;

/// An exact rational alongside its nearest double.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exact(pub Q);

impl Exact {
    pub fn value(&self) -> f64 {
        q_f64(self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Exact", 2)?;
        st.serialize_field("exact", &format!("{}/{}", self.0.numer(), self.0.denom()))?;
        st.serialize_field("value", &self.value())?;
        st.end()
    }
}

fn q_f64(x: Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// The full parameter vector of the construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSet {
    pub h: u32,
    pub delta: Exact,
    pub q: u32,
    pub big_b: Exact,
    pub nu: u32,
    pub u: f64,
    pub j: Interval,
    pub l: Interval,
    pub b: Exact,
    pub delta0: f64,
    /// `delta0^12`, kept separately because `1 - delta0^12` rounds to 1.
    pub delta0_pow12: f64,
    pub d: f64,
    pub alpha: f64,
    pub mu_alpha: f64,
    pub sigma0: f64,
    pub cq: f64,
    pub c: f64,
    pub alpha_bar: f64,
    pub alpha_star: f64,
    /// Smallest `nu` with `2^{nu (delta - 2 delta0/(1 - delta0))} >= 7^{1+delta}`.
    pub nu_delta: u64,
    pub checks: Vec<Check>,
}

impl ParameterSet {
    /// `B nu`, the base-2 logarithm of `U^B`.
    pub fn b_nu(&self) -> f64 {
        self.big_b.value() * self.nu as f64
    }

    pub fn with_cq(mut self, cq: f64) -> Result<Self> {
        if !(cq > 0.0 && cq.is_finite()) {
            return Err(Error::invalid(format!("C_q must be positive, got {cq}")));
        }
        self.cq = cq;
        self.c = 2.0 * self.mu_alpha * cq;
        Ok(self)
    }

    pub fn with_alpha_star(mut self, alpha_star: f64) -> Result<Self> {
        if !(alpha_star > 0.0 && alpha_star < 1.0) {
            return Err(Error::invalid(format!("alpha* must lie in (0, 1), got {alpha_star}")));
        }
        self.alpha_star = alpha_star;
        Ok(self)
    }

    /// The family-supremum threshold `mu(alpha) M`.
    pub fn threshold(&self) -> f64 {
        self.mu_alpha * m_bound(self, self.cq)
    }

    pub fn all_exact_checks_pass(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn exact_check(name: &str, ok: bool, detail: String) -> Check {
    Check::new(CheckTag::MainParameters, name, Basis::Theorem, ok, detail)
}

/// Derive every parameter from `(H, nu, alpha)` and an optional `delta0`.
///
/// The rational fields and their identities are checked exactly. When
/// `delta0` is omitted it is set to `0.99 min(delta/(2+delta), b^{1/6})`.
pub fn derive_params(h: u32, nu: u32, alpha: f64, delta0: Option<f64>) -> Result<ParameterSet> {
    if !(H_MIN..=H_MAX).contains(&h) {
        return Err(Error::invalid(format!("H must lie in [{H_MIN}, {H_MAX}], got {h}")));
    }
    if nu == 0 {
        return Err(Error::invalid("nu must be a positive integer"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let hh = h as i64;
    let one = Q::one();
    let delta = q(hh - 1, 8 * hh);
    let qq = 5 * hh;
    let qr = Q::from_integer(qq);
    let big_b = q(4, 1) * qr * delta + q(2, 1) * (delta + one);
    let b = delta / (q(2, 1) * big_b);

    let mut checks = Vec::new();
    let one_minus_8d = one - q(8, 1) * delta;
    checks.push(exact_check(
        "q = 5/(1 - 8 delta) = 5H",
        !one_minus_8d.is_zero() && q(5, 1) / one_minus_8d == qr,
        format!("delta = {delta}, q = {qq}"),
    ));
    let q_floor = q(4, 1) * (delta + one) / one_minus_8d;
    checks.push(exact_check(
        "0 < delta < 1/8 and q > 4(delta + 1)/(1 - 8 delta)",
        delta > Q::zero() && delta < q(1, 8) && qr > q_floor,
        format!("4(delta + 1)/(1 - 8 delta) = {q_floor}"),
    ));
    checks.push(exact_check(
        "2B = 8 q delta + 4(delta + 1) < q",
        q(2, 1) * big_b == q(8, 1) * qr * delta + q(4, 1) * (delta + one) && q(2, 1) * big_b < qr,
        format!("2B = {}", q(2, 1) * big_b),
    ));
    let identity = (one + delta) * (one + one / qr) - big_b / (q(2, 1) * qr);
    checks.push(exact_check(
        "(1 + delta)(1 + 1/q) - B/(2q) = 1 - delta",
        identity == one - delta,
        format!("left side = {identity}, 1 - delta = {}", one - delta),
    ));
    let b_cap = q(5, 1) / (q(2, 1) * one_minus_8d);
    let b_floor = delta * one_minus_8d / q(5, 1);
    checks.push(exact_check(
        "B < 5/(2(1 - 8 delta)) and b >= delta(1 - 8 delta)/5",
        big_b < b_cap && b >= b_floor,
        format!("B = {big_b} < {b_cap}, b = {b} >= {b_floor}"),
    ));
    checks.push(exact_check("H < 9", h < 9, format!("H = {h}")));

    let delta_f = q_f64(delta);
    let b_f = q_f64(b);
    let delta0_sup = (delta_f / (2.0 + delta_f)).min(b_f.powf(1.0 / 6.0));
    let delta0 = match delta0 {
        Some(d0) => {
            if !(d0 > 0.0) {
                return Err(Error::ConstraintViolation(format!("delta0 = {d0} must be positive")));
            }
            if !(2.0 * d0 / (1.0 - d0) < delta_f) || d0 >= 1.0 {
                return Err(Error::ConstraintViolation(format!(
                    "2 delta0/(1 - delta0) < delta fails for delta0 = {d0}, delta = {delta_f}"
                )));
            }
            if !(d0.powi(6) <= b_f) {
                return Err(Error::ConstraintViolation(format!(
                    "delta0 <= b^(1/6) fails for delta0 = {d0}, b = {b_f}"
                )));
            }
            d0
        }
        None => DELTA0_FRACTION * delta0_sup,
    };
    let gap = delta_f - 2.0 * delta0 / (1.0 - delta0);
    checks.push(exact_check(
        "0 < 2 delta0/(1 - delta0) < delta",
        delta0 > 0.0 && gap > 0.0,
        format!("delta - 2 delta0/(1 - delta0) = {gap:e}"),
    ));
    checks.push(exact_check(
        "b^(1/6) >= delta0",
        delta0.powi(6) <= b_f,
        format!("delta0^6 = {:e}, b = {b_f:e}", delta0.powi(6)),
    ));
    let delta0_pow12 = delta0.powi(12);
    let sigma0 = 1.0 - delta0_pow12;
    let remark = 1.0 - 19f64.powi(-12);
    checks.push(exact_check(
        "sigma0 = 1 - delta0^12 > 1 - 19^(-12)",
        delta0 < 1.0 / 19.0 && delta0_pow12 < 19f64.powi(-12) && sigma0 > remark,
        format!("delta0 = {delta0}, delta0^12 = {delta0_pow12:e}, 19^-12 = {:e}", 19f64.powi(-12)),
    ));

    let big_b_f = q_f64(big_b);
    let log2_j = 2.0 * big_b_f * nu as f64;
    if log2_j > 1000.0 {
        return Err(Error::invalid(format!(
            "nu = {nu} puts J at 2^{log2_j:.1}, beyond double precision"
        )));
    }
    let u = 2f64.powi(nu as i32);
    let u_b = 2f64.powf(big_b_f * nu as f64);
    let j = Interval::new(u_b * u_b, 2.0 * u_b * u_b)?;
    let l = Interval::new(u_b, 8.0 * u_b)?;
    let mu_alpha = (1.0 - alpha).powf(-1.0 / (2.0 * qq as f64));
    let nu_delta = nu_delta(delta_f, delta0);
    let b_nu = big_b_f * nu as f64;

    Ok(ParameterSet {
        h,
        delta: Exact(delta),
        q: qq as u32,
        big_b: Exact(big_b),
        nu,
        u,
        j,
        l,
        b: Exact(b),
        delta0,
        delta0_pow12,
        d: 1.0 / (2.0 * big_b_f * (1.0 - delta0)),
        alpha,
        mu_alpha,
        sigma0,
        cq: DEFAULT_CQ,
        c: 2.0 * mu_alpha * DEFAULT_CQ,
        alpha_bar: alpha_bar_from(alpha, b_nu),
        alpha_star: DEFAULT_ALPHA_STAR,
        nu_delta,
        checks,
    })
}

/// `ceil((1 + delta) log2 7 / (delta - 2 delta0/(1 - delta0)))`.
pub fn nu_delta(delta: f64, delta0: f64) -> u64 {
    let gap = delta - 2.0 * delta0 / (1.0 - delta0);
    if !(gap > 0.0) {
        return u64::MAX;
    }
    ((1.0 + delta) * 7f64.log2() / gap).ceil() as u64
}

/// `M = 2 C_q 2^{(1 - delta) nu} nu^{1/(2q) - 1/2}`
pub fn m_bound(params: &ParameterSet, cq: f64) -> f64 {
    let nu = params.nu as f64;
    let q = params.q as f64;
    2.0 * cq * 2f64.powf((1.0 - params.delta.value()) * nu) * nu.powf(0.5 / q - 0.5)
}

/// `1 - (1 + 2^{-B nu}) / (1 + 3(sqrt 2 - 1) 2^{-B nu}) (1 - alpha)`
pub fn alpha_bar_from(alpha: f64, b_nu: f64) -> f64 {
    let x = 2f64.powf(-b_nu);
    1.0 - (1.0 + x) / (1.0 + 3.0 * (std::f64::consts::SQRT_2 - 1.0) * x) * (1.0 - alpha)
}

/// `[T - sqrt T, T + sqrt T]` lies inside `theta + L` for `T = psi(theta)`.
pub fn window_contained(params: &ParameterSet, theta: f64) -> bool {
    let t = theta + 3.0 * theta.sqrt();
    let r = t.sqrt();
    theta + params.l.lo <= t - r && t + r <= theta + params.l.hi
}

/// Exponents of the prime range attached to a window centre `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeNesting {
    /// `|D(1 - delta0) - 1/(2B)|`, zero up to rounding.
    pub lower_mismatch: f64,
    /// `(1+delta)/(2B) (ln T - ln 7) - D(1 + delta0) ln T`; nonnegative when
    /// the range nests.
    pub upper_slack: f64,
    /// Whether `nu >= nu_delta`, in which case nesting is guaranteed.
    pub guaranteed: bool,
}

impl RangeNesting {
    pub fn nests(&self) -> bool {
        self.lower_mismatch <= 1e-12 && self.upper_slack >= 0.0
    }
}

pub fn range_nesting(params: &ParameterSet, t: f64) -> RangeNesting {
    let big_b = params.big_b.value();
    let delta = params.delta.value();
    let lt = t.ln();
    RangeNesting {
        lower_mismatch: (params.d * (1.0 - params.delta0) - 1.0 / (2.0 * big_b)).abs(),
        upper_slack: (1.0 + delta) / (2.0 * big_b) * (lt - 7f64.ln()) - params.d * (1.0 + params.delta0) * lt,
        guaranteed: params.nu as u64 >= params.nu_delta,
    }
}
