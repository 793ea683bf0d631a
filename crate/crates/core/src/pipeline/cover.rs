use serde::{Deserialize, Serialize};

use super::ParameterSet;
use crate::error::{Error, Result};
use crate::interval::Interval;

/// `psi(theta) = theta + 3 sqrt(theta)`
pub fn psi(theta: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::invalid(format!("psi needs theta >= 0, got {theta}")));
    }
    Ok(theta + 3.0 * theta.sqrt())
}

/// Length of `psi([a, b])`, `(b - a) + 3(sqrt b - sqrt a)`.
pub fn psi_image_len(a: f64, b: f64) -> Result<f64> {
    if !(0.0 <= a && a <= b) {
        return Err(Error::invalid(format!("need 0 <= a <= b, got [{a}, {b}]")));
    }
    Ok((b - a) + 3.0 * (b.sqrt() - a.sqrt()))
}

/// The subdivision `K_i = [psi(2^{2B nu}) + (i - 1) w, psi(2^{2B nu}) + i w)`,
/// `w = 2^{B nu - 1}`, of `psi(J)` and which pieces the good set reaches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub start: f64,
    pub width: f64,
    pub total: usize,
    /// 1-based indices of the pieces met by `psi` of the good set.
    pub hit: Vec<usize>,
    pub count: usize,
    /// `alpha_bar (2^{B nu + 1} + 6(sqrt 2 - 1))`
    pub alpha_bar_target: f64,
    /// `alpha* 2^{B nu + 1}`
    pub alpha_star_target: f64,
    pub meets_alpha_bar: bool,
    pub meets_alpha_star: bool,
}

impl Covering {
    /// `K_i` as a closed interval (the right end is excluded in the
    /// subdivision itself).
    pub fn piece(&self, i: usize) -> Result<Interval> {
        if i == 0 || i > self.total {
            return Err(Error::invalid(format!("piece index {i} outside 1..={}", self.total)));
        }
        Interval::new(
            self.start + (i - 1) as f64 * self.width,
            self.start + i as f64 * self.width,
        )
    }
}

struct Grid {
    start: f64,
    width: f64,
    total: usize,
    exact_len: f64,
}

/// Largest subdivision the counters will index.
pub const MAX_PIECES: f64 = 1e8;

fn grid(params: &ParameterSet) -> Result<Grid> {
    let b_nu = params.b_nu();
    let exact_len = 2f64.powf(b_nu + 1.0) + 6.0 * (std::f64::consts::SQRT_2 - 1.0);
    if exact_len.ceil() > MAX_PIECES {
        return Err(Error::InfeasibleScale(format!(
            "subdivision has {exact_len:.3e} pieces, above {MAX_PIECES:e}"
        )));
    }
    Ok(Grid {
        start: params.j.lo + 3.0 * params.j.lo.sqrt(),
        width: 2f64.powf(b_nu - 1.0),
        total: exact_len.ceil() as usize,
        exact_len,
    })
}

impl Grid {
    fn index(&self, x: f64) -> usize {
        let i = ((x - self.start) / self.width).floor();
        (i.max(0.0) as usize + 1).min(self.total)
    }

    fn finish(self, params: &ParameterSet, mut hit: Vec<usize>) -> Covering {
        hit.sort_unstable();
        hit.dedup();
        let count = hit.len();
        let alpha_bar_target = params.alpha_bar * self.exact_len;
        let alpha_star_target = params.alpha_star * 2f64.powf(params.b_nu() + 1.0);
        Covering {
            start: self.start,
            width: self.width,
            total: self.total,
            hit,
            count,
            alpha_bar_target,
            alpha_star_target,
            meets_alpha_bar: count as f64 >= alpha_bar_target,
            meets_alpha_star: count as f64 >= alpha_star_target,
        }
    }
}

fn check_in_j(params: &ParameterSet, theta: f64) -> Result<()> {
    if !params.j.contains(theta) {
        return Err(Error::invalid(format!("theta = {theta} lies outside J = {}", params.j)));
    }
    Ok(())
}

/// Count the pieces `K_i` containing `psi(theta)` for some good `theta`.
pub fn covering_subdivision(params: &ParameterSet, good_thetas: &[f64]) -> Result<Covering> {
    let g = grid(params)?;
    let mut hit = Vec::with_capacity(good_thetas.len());
    for &theta in good_thetas {
        check_in_j(params, theta)?;
        hit.push(g.index(psi(theta)?));
    }
    Ok(g.finish(params, hit))
}

/// As [`covering_subdivision`] for a good set given as a union of closed
/// intervals, using `psi([a, b]) = [psi(a), psi(b)]`.
pub fn covering_from_intervals(params: &ParameterSet, good: &[Interval]) -> Result<Covering> {
    let g = grid(params)?;
    let mut hit = Vec::new();
    for iv in good {
        check_in_j(params, iv.lo)?;
        check_in_j(params, iv.hi)?;
        let (a, b) = (g.index(psi(iv.lo)?), g.index(psi(iv.hi)?));
        hit.extend(a..=b);
    }
    Ok(g.finish(params, hit))
}
