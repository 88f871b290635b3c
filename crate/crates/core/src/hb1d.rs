//! One-dimensional finite-element oracle on dyadic grids of `[0, 1]`:
//! nodal hat functions, uniform interpolation and hierarchical surpluses.
//!
//! Nothing here touches network code, so it can referee the constructions.

use crate::error::{Error, Result};

const BREAK_TOL: f64 = 1e-14;

/// Uniform grid `x_i = i h` on `[0, 1]` with `h = 2^-level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    level: u32,
}

impl Grid1D {
    pub fn new(level: u32) -> Result<Self> {
        if level > 52 {
            return Err(Error::arg(format!("grid level {level} exceeds 52")));
        }
        Ok(Grid1D { level })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of cells, `2^level`.
    pub fn cells(&self) -> usize {
        1usize << self.level
    }

    pub fn h(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.cells()).map(|i| self.point(i)).collect()
    }
}

/// Continuous piecewise-linear function stored by breakpoints, extended
/// linearly beyond its hull with the given slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear1D {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinear1D {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        left_slope: f64,
        right_slope: f64,
    ) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::arg("piecewise-linear function needs a breakpoint"));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::dim(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !values.iter().chain(&breakpoints).all(|v| v.is_finite())
            || !left_slope.is_finite()
            || !right_slope.is_finite()
        {
            return Err(Error::arg("breakpoints, values and slopes must be finite"));
        }
        for w in breakpoints.windows(2) {
            if w[1] - w[0] <= BREAK_TOL * w[0].abs().max(w[1].abs()).max(1.0) {
                return Err(Error::arg(format!(
                    "breakpoints must be strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(PiecewiseLinear1D {
            breakpoints,
            values,
            left_slope,
            right_slope,
        })
    }

    /// Interpolant of the given nodes, with boundary segments continued
    /// outside the hull.
    pub fn through(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = breakpoints.len();
        let (left, right) = if n >= 2 {
            (
                (values[1] - values[0]) / (breakpoints[1] - breakpoints[0]),
                (values[n - 1] - values[n - 2]) / (breakpoints[n - 1] - breakpoints[n - 2]),
            )
        } else {
            (0.0, 0.0)
        };
        Self::new(breakpoints, values, left, right)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.right_slope
    }

    /// `(first, last)` breakpoint.
    pub fn hull(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Linear pieces between consecutive breakpoints, as `(x0, x1, slope, intercept)`.
    pub fn segments(&self) -> Vec<Segment> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| {
                let slope = (v[1] - v[0]) / (x[1] - x[0]);
                Segment {
                    x0: x[0],
                    x1: x[1],
                    slope,
                    intercept: v[0] - slope * x[0],
                }
            })
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        let n = bp.len();
        if x <= bp[0] {
            return self.values[0] + self.left_slope * (x - bp[0]);
        }
        if x >= bp[n - 1] {
            return self.values[n - 1] + self.right_slope * (x - bp[n - 1]);
        }
        // first index with bp[k] > x; 1 <= k <= n - 1
        let k = bp.partition_point(|&b| b <= x);
        let (x0, x1) = (bp[k - 1], bp[k]);
        if x == x0 {
            return self.values[k - 1];
        }
        let t = (x - x0) / (x1 - x0);
        self.values[k - 1] + t * (self.values[k] - self.values[k - 1])
    }
}

/// One linear piece `y = slope x + intercept` on `[x0, x1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// Evaluate `f` at `x`.
pub fn pwl_eval(f: &PiecewiseLinear1D, x: f64) -> f64 {
    f.eval(x)
}

fn tent(x: f64) -> f64 {
    // g(x) = 2x on [0, 1/2], 2(1 - x) on [1/2, 1], 0 elsewhere
    if (0.0..=0.5).contains(&x) {
        2.0 * x
    } else if x > 0.5 && x <= 1.0 {
        2.0 * (1.0 - x)
    } else {
        0.0
    }
}

/// Hat function `φ_{ℓ,i}` of the level-`ℓ` grid. At level 0 the two basis
/// functions are `1 - x` and `x`.
pub fn nodal_basis(level: u32, i: usize, x: f64) -> Result<f64> {
    let grid = Grid1D::new(level)?;
    if i > grid.cells() {
        return Err(Error::arg(format!(
            "node {i} out of range 0..={} at level {level}",
            grid.cells()
        )));
    }
    if level == 0 {
        return Ok(if i == 0 { 1.0 - x } else { x });
    }
    let h = grid.h();
    Ok(tent((x - (i as f64 - 1.0) * h) / (2.0 * h)))
}

/// Interpolant `I_ℓ u` from the samples `u(x_{ℓ,i})`, `i = 0..=2^ℓ`.
pub fn interpolate_1d(samples: &[f64], level: u32) -> Result<PiecewiseLinear1D> {
    let grid = Grid1D::new(level)?;
    if samples.len() != grid.cells() + 1 {
        return Err(Error::dim(format!(
            "level {level} needs {} samples, got {}",
            grid.cells() + 1,
            samples.len()
        )));
    }
    PiecewiseLinear1D::through(grid.points(), samples.to_vec())
}

/// Sample `u` on the level-`ℓ` grid.
pub fn sample<F: Fn(f64) -> f64>(u: F, level: u32) -> Result<Vec<f64>> {
    Ok(Grid1D::new(level)?.points().into_iter().map(u).collect())
}

/// Hierarchical surpluses `μ_{ℓ,i} = u(x_{ℓ,i}) - (u(x_{ℓ,i-1}) + u(x_{ℓ,i+1}))/2`
/// for `ℓ = 1..=levels` and odd `i`. Entry `ℓ - 1` holds level `ℓ`, in
/// increasing `i`.
pub fn hierarchical_coeffs<F: Fn(f64) -> f64>(u: F, levels: u32) -> Result<Vec<Vec<f64>>> {
    (1..=levels)
        .map(|l| {
            let grid = Grid1D::new(l)?;
            Ok((1..grid.cells())
                .step_by(2)
                .map(|i| {
                    let mid = u(grid.point(i));
                    mid - 0.5 * (u(grid.point(i - 1)) + u(grid.point(i + 1)))
                })
                .collect())
        })
        .collect()
}

/// `I_0 u + Σ_ℓ Σ_i μ_{ℓ,i} φ_{ℓ,i}` at `x`, given `u(0)`, `u(1)` and the
/// surpluses from [`hierarchical_coeffs`].
pub fn hierarchical_eval(u0: f64, u1: f64, coeffs: &[Vec<f64>], x: f64) -> Result<f64> {
    let mut total = u0 * nodal_basis(0, 0, x)? + u1 * nodal_basis(0, 1, x)?;
    for (k, level) in coeffs.iter().enumerate() {
        let l = k as u32 + 1;
        for (j, mu) in level.iter().enumerate() {
            total += mu * nodal_basis(l, 2 * j + 1, x)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = Grid1D::new(3).unwrap();
        assert_eq!(g.cells(), 8);
        assert_eq!(g.h() * g.cells() as f64, 1.0);
        assert_eq!(g.points()[3], 0.375);
    }

    #[test]
    fn nodal_basis_values() {
        assert_eq!(nodal_basis(1, 1, 0.5).unwrap(), 1.0);
        assert_eq!(nodal_basis(2, 1, 0.5).unwrap(), 0.0);
        assert_eq!(nodal_basis(2, 3, 0.6875).unwrap(), 0.75);
        assert_eq!(nodal_basis(0, 0, 0.25).unwrap(), 0.75);
        assert_eq!(nodal_basis(0, 1, 0.25).unwrap(), 0.25);
        assert!(nodal_basis(2, 5, 0.5).is_err());
    }

    #[test]
    fn boundary_hats_are_halves() {
        // φ_{ℓ,0} restricted to [0,1] falls from 1 at 0
        assert_eq!(nodal_basis(2, 0, 0.0).unwrap(), 1.0);
        assert_eq!(nodal_basis(2, 0, 0.125).unwrap(), 0.5);
        assert_eq!(nodal_basis(2, 4, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn interpolate_square() {
        let f = interpolate_1d(&sample(|x| x * x, 1).unwrap(), 1).unwrap();
        assert_eq!(f.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(f.values(), &[0.0, 0.25, 1.0]);
        assert_eq!(f.eval(0.25), 0.125);
        let f2 = interpolate_1d(&sample(|x| x * x, 2).unwrap(), 2).unwrap();
        // midpoint of the chord through (1/4, 1/16) and (1/2, 1/4)
        assert_eq!(f2.eval(0.375), 0.15625);
    }

    #[test]
    fn interpolate_constant() {
        let f = interpolate_1d(&[1.0; 5], 2).unwrap();
        assert!(f.segments().iter().all(|s| s.slope == 0.0));
        assert_eq!(f.eval(0.3), 1.0);
    }

    #[test]
    fn sample_count_checked() {
        assert!(interpolate_1d(&[0.0, 1.0], 1).is_err());
    }

    #[test]
    fn eval_outside_hull_uses_slopes() {
        let f = PiecewiseLinear1D::new(vec![0.0, 1.0], vec![0.0, 1.0], -2.0, 3.0).unwrap();
        assert_eq!(f.eval(2.0), 4.0);
        assert_eq!(f.eval(-1.0), 2.0);
        assert_eq!(f.eval(1.0), 1.0);
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        assert!(PiecewiseLinear1D::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.0, 0.0).is_err());
        assert!(PiecewiseLinear1D::new(vec![1.0, 0.0], vec![1.0, 1.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn square_surpluses_are_level_constant() {
        let coeffs = hierarchical_coeffs(|x| x * x, 10).unwrap();
        for (k, level) in coeffs.iter().enumerate() {
            let expected = -(4f64.powi(-(k as i32 + 1)));
            assert_eq!(level.len(), 1 << k);
            assert!(level.iter().all(|mu| (mu - expected).abs() < 1e-14));
        }
    }

    #[test]
    fn linear_surpluses_vanish() {
        let coeffs = hierarchical_coeffs(|x| 3.0 * x - 1.0, 6).unwrap();
        assert!(coeffs.iter().flatten().all(|mu| mu.abs() < 1e-15));
    }

    #[test]
    fn cubic_first_surplus() {
        let coeffs = hierarchical_coeffs(|x| x * x * x, 1).unwrap();
        assert_eq!(coeffs[0], vec![-0.375]);
    }

    #[test]
    fn reconstruction_matches_interpolant() {
        let u = |x: f64| (5.0 * x).sin() + x * x * x;
        let levels = 6;
        let coeffs = hierarchical_coeffs(u, levels).unwrap();
        let interp = interpolate_1d(&sample(u, levels).unwrap(), levels).unwrap();
        for x in Grid1D::new(levels).unwrap().points() {
            let rec = hierarchical_eval(u(0.0), u(1.0), &coeffs, x).unwrap();
            assert!((rec - interp.eval(x)).abs() < 1e-12);
        }
    }
}
