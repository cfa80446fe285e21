use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::CountLadder;

/// Least-squares fit of `log count = alpha log B + beta log log B + gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub residual_rms: f64,
    /// Half-open range of ladder indices used.
    pub window: (usize, usize),
}

const MIN_POINTS: usize = 8;

pub fn fit(ladder: &CountLadder) -> Result<FitResult> {
    fit_points(&ladder.points)
}

/// Fits over the top half of the ladder.
pub fn fit_points(points: &[(f64, u64)]) -> Result<FitResult> {
    if points.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_POINTS,
            got: points.len(),
        });
    }
    let window = (points.len() / 2, points.len());
    let rows = &points[window.0..window.1];
    if let Some(&(b, _)) = rows.iter().find(|&&(b, c)| c == 0 || b <= 1.0) {
        return Err(Error::ZeroCount(b));
    }
    let m = rows.len();
    let x = DMatrix::from_fn(m, 3, |i, j| {
        let lb = rows[i].0.ln();
        match j {
            0 => lb,
            1 => lb.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(m, rows.iter().map(|&(_, c)| (c as f64).ln()));
    let coef = x
        .clone()
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::Unsupported(format!("least squares: {e}")))?;
    let resid = &x * &coef - &y;
    Ok(FitResult {
        alpha: coef[0],
        beta: coef[1],
        gamma: coef[2],
        residual_rms: (resid.norm_squared() / m as f64).sqrt(),
        window,
    })
}
