//! Tables of functions that are smooth in `sqrt(tau)`, interpolated by local Lagrange.

use crate::{Complex64, Error, Result};

const POINTS: usize = 6;

/// Samples at `tau = 0` and at a strictly increasing positive grid.
#[derive(Debug, Clone)]
pub struct SqrtTable {
    // sqrt(tau), starting with 0
    nodes: Vec<f64>,
    values: Vec<Complex64>,
}

impl SqrtTable {
    pub fn new(origin: Complex64, grid: &[f64], values: Vec<Complex64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(Error::Domain("table needs matching, non-empty samples".into()));
        }
        let nodes = std::iter::once(0.0).chain(grid.iter().map(|t| t.sqrt())).collect();
        let values = std::iter::once(origin).chain(values).collect();
        Ok(SqrtTable { nodes, values })
    }

    /// Grid with `points` nodes uniform in `sqrt(tau)` over `(0, t_max]`.
    pub fn sqrt_uniform_grid(t_max: f64, points: usize) -> Vec<f64> {
        let h = t_max.sqrt() / points as f64;
        (1..=points).map(|k| (k as f64 * h).powi(2)).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.nodes.last().map_or(0.0, |s| s * s)
    }

    pub fn eval(&self, tau: f64) -> Result<Complex64> {
        let max = self.t_max();
        if !(0.0..=max * (1.0 + 1e-12)).contains(&tau) {
            return Err(Error::ProfileRange { t: tau, max });
        }
        let s = tau.sqrt();
        let nn = self.nodes.len();
        // short tables fall back to a lower order
        let order = POINTS.min(nn);
        let pos = self.nodes.partition_point(|&x| x < s);
        let start = pos.saturating_sub(order / 2).min(nn - order);
        let xs = &self.nodes[start..start + order];
        if let Some(k) = xs.iter().position(|&x| x == s) {
            return Ok(self.values[start + k]);
        }
        Ok((0..order)
            .map(|i| {
                let w: f64 = (0..order).filter(|&j| j != i).map(|j| (s - xs[j]) / (xs[i] - xs[j])).product();
                w * self.values[start + i]
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn reproduces_smooth_function_of_sqrt() {
        let g = |t: f64| c((3.0 * t.sqrt()).sin() + t);
        let grid = SqrtTable::sqrt_uniform_grid(4.0, 200);
        let tab = SqrtTable::new(g(0.0), &grid, grid.iter().map(|&t| g(t)).collect()).unwrap();
        for &t in &[0.0, 1e-5, 0.3, 2.2, 4.0] {
            assert!((tab.eval(t).unwrap() - g(t)).norm() < 1e-10, "t={t}");
        }
        assert!(tab.eval(4.1).is_err());
    }

    #[test]
    fn short_tables_drop_order() {
        let tab = SqrtTable::new(c(1.0), &[1.0, 4.0], vec![c(2.0), c(3.0)]).unwrap();
        // quadratic through (0,1), (1,2), (2,3) in sqrt(tau) is linear
        assert!((tab.eval(2.25).unwrap() - c(2.5)).norm() < 1e-14);
        assert!(SqrtTable::new(c(1.0), &[], vec![]).is_err());
    }
}
