//! Exact analysis of one-dimensional networks as piecewise-linear functions,
//! and seeded sup-norm sampling for higher dimensions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem2d::UniformMesh2D;
use crate::hb1d::PiecewiseLinear1D;
use crate::net::ReluNet;
use crate::parallel::{argmax, map_slice, Execution};

const DEDUP_TOL: f64 = 1e-14;
const COLLINEAR_TOL: f64 = 1e-12;

/// How a [`SupReport`] value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Closed-form maximum over all candidate points.
    Exact,
    /// Maximum over a finite point set.
    Sampled,
}

/// A supremum together with the point attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupReport {
    pub value: f64,
    pub witness: Vec<f64>,
    pub sample_count: usize,
    pub mode: Mode,
}

fn same_point(a: f64, b: f64) -> bool {
    (a - b).abs() <= DEDUP_TOL * a.abs().max(b.abs()).max(1.0)
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::arg(format!("invalid interval [{a}, {b}]")));
    }
    Ok(())
}

/// Exact piecewise-linear form of a scalar network of one input on `[a, b]`,
/// using the default execution mode.
pub fn extract_pwl<N: ReluNet + ?Sized>(net: &N, a: f64, b: f64) -> Result<PiecewiseLinear1D> {
    extract_pwl_with(net, a, b, Execution::default())
}

/// Exact piecewise-linear form of `net` on `[a, b]`.
///
/// Breakpoints are propagated layer by layer: once the kinks of layers
/// `1..l` are known, every pre-activation of layer `l` is linear between
/// consecutive known kinks, so its zero crossings are found by linear
/// interpolation. Beyond the hull the one-sided slopes at `a` and `b` are
/// kept.
pub fn extract_pwl_with<N: ReluNet + ?Sized>(
    net: &N,
    a: f64,
    b: f64,
    exec: Execution,
) -> Result<PiecewiseLinear1D> {
    if net.input_dim() != 1 {
        return Err(Error::dim(format!(
            "breakpoint extraction needs one input, network has {}",
            net.input_dim()
        )));
    }
    check_interval(a, b)?;
    let trace = |x: &f64| net.trace(&[*x]).map(|t| t.preactivations);
    let mut xs = if a == b { vec![a] } else { vec![a, b] };
    let mut pre: Vec<Vec<Vec<f64>>> = map_slice(&xs, exec, trace).into_iter().collect::<Result<_>>()?;
    for layer in 0..net.depth() {
        let mut fresh = Vec::new();
        for k in 0..xs.len().saturating_sub(1) {
            let (x0, x1) = (xs[k], xs[k + 1]);
            let (z0, z1) = (&pre[k][layer], &pre[k + 1][layer]);
            for (&u, &v) in z0.iter().zip(z1) {
                if (u < 0.0 && v > 0.0) || (u > 0.0 && v < 0.0) {
                    let t = u / (u - v);
                    let root = x0 + t * (x1 - x0);
                    if root > x0 && root < x1 {
                        fresh.push(root);
                    }
                }
            }
        }
        if fresh.is_empty() {
            continue;
        }
        fresh.sort_by(f64::total_cmp);
        let fresh_pre: Vec<Vec<Vec<f64>>> =
            map_slice(&fresh, exec, trace).into_iter().collect::<Result<_>>()?;
        let mut merged_x = Vec::with_capacity(xs.len() + fresh.len());
        let mut merged_pre = Vec::with_capacity(xs.len() + fresh.len());
        let mut old = xs.into_iter().zip(pre).peekable();
        let mut new = fresh.into_iter().zip(fresh_pre).peekable();
        loop {
            let take_old = match (old.peek(), new.peek()) {
                (Some(o), Some(n)) => o.0 <= n.0,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            let (x, p) = if take_old { old.next() } else { new.next() }.unwrap();
            match merged_x.last() {
                Some(&last) if same_point(last, x) => {
                    // keep interval endpoints and earlier points
                    if !take_old {
                        continue;
                    }
                    if x == a || x == b {
                        *merged_x.last_mut().unwrap() = x;
                        *merged_pre.last_mut().unwrap() = p;
                    }
                }
                _ => {
                    merged_x.push(x);
                    merged_pre.push(p);
                }
            }
        }
        xs = merged_x;
        pre = merged_pre;
    }
    let values: Vec<f64> = map_slice(&xs, exec, |x| net.eval(&[*x]))
        .into_iter()
        .collect::<Result<_>>()?;
    let (_, left) = net.directional(&[a], &[-1.0])?;
    let (_, right) = net.directional(&[b], &[1.0])?;
    PiecewiseLinear1D::new(xs, values, -left, right)
}

/// Linear pieces of `f` covering `[a, b]`, as `(x0, x1, slope)`.
fn pieces(f: &PiecewiseLinear1D, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
    let mut knots = vec![a];
    knots.extend(f.breakpoints().iter().copied().filter(|&x| x > a && x < b));
    if b > a {
        knots.push(b);
    }
    knots
        .windows(2)
        .map(|w| {
            let slope = slope_at(f, 0.5 * (w[0] + w[1]));
            (w[0], w[1], slope)
        })
        .collect()
}

fn slope_at(f: &PiecewiseLinear1D, x: f64) -> f64 {
    let (lo, hi) = f.hull();
    if x < lo {
        return f.left_slope();
    }
    if x > hi {
        return f.right_slope();
    }
    let segs = f.segments();
    let k = segs.partition_point(|s| s.x1 < x);
    segs.get(k).map_or(0.0, |s| s.slope)
}

fn max_over(candidates: Vec<f64>, err: impl Fn(f64) -> f64) -> SupReport {
    let values: Vec<f64> = candidates.iter().map(|&x| err(x)).collect();
    let (k, value) = argmax(&values).expect("at least one candidate");
    SupReport {
        value,
        witness: vec![candidates[k]],
        sample_count: candidates.len(),
        mode: Mode::Exact,
    }
}

/// Exact `sup |x^2 - f(x)|` over `[a, b]`. On a piece of slope `m` the
/// error is a quadratic whose extremum sits at `x = m / 2`, so the piece
/// endpoints and that vertex are the only candidates.
pub fn sup_error_vs_quadratic(f: &PiecewiseLinear1D, a: f64, b: f64) -> Result<SupReport> {
    check_interval(a, b)?;
    let mut candidates = vec![a];
    for (x0, x1, slope) in pieces(f, a, b) {
        let vertex = 0.5 * slope;
        if vertex > x0 && vertex < x1 {
            candidates.push(vertex);
        }
        candidates.push(x1);
    }
    Ok(max_over(candidates, |x| (x * x - f.eval(x)).abs()))
}

/// Exact `sup |2x - f'(x)|` over `[a, b]`, the `W^{1,∞}` seminorm of
/// `x^2 - f`. The derivative gap is linear on each piece, so piece
/// endpoints suffice.
pub fn w1inf_error_vs_quadratic(f: &PiecewiseLinear1D, a: f64, b: f64) -> Result<SupReport> {
    check_interval(a, b)?;
    let mut candidates = Vec::new();
    let mut gaps = Vec::new();
    let ps = pieces(f, a, b);
    if ps.is_empty() {
        candidates.push(a);
        gaps.push((2.0 * a - slope_at(f, a)).abs());
    }
    for (x0, x1, slope) in ps {
        for x in [x0, x1] {
            candidates.push(x);
            gaps.push((2.0 * x - slope).abs());
        }
    }
    let (k, value) = argmax(&gaps).expect("at least one piece");
    Ok(SupReport {
        value,
        witness: vec![candidates[k]],
        sample_count: candidates.len(),
        mode: Mode::Exact,
    })
}

/// Number of maximal linear pieces of `f` on its hull, merging neighbours
/// whose slopes differ by less than `1e-12`.
pub fn linear_region_count(f: &PiecewiseLinear1D) -> usize {
    let segs = f.segments();
    if segs.is_empty() {
        return 1;
    }
    1 + segs
        .windows(2)
        .filter(|w| (w[1].slope - w[0].slope).abs() >= COLLINEAR_TOL)
        .count()
}

/// Axis-aligned box, one `(lo, hi)` pair per coordinate.
pub type Domain = [(f64, f64)];

/// `n` points drawn uniformly from `domain` with a ChaCha8 stream.
pub fn random_points(domain: &Domain, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            domain
                .iter()
                .map(|&(lo, hi)| if lo == hi { lo } else { rng.random_range(lo..=hi) })
                .collect()
        })
        .collect()
}

/// `max |f - g|` over `structured` followed by `n_random` seeded random
/// points of `domain`. Ties go to the earliest point, so the report is
/// deterministic for a fixed seed.
pub fn sup_error_sampled<F, G>(
    f: F,
    g: G,
    domain: &Domain,
    structured: &[Vec<f64>],
    n_random: usize,
    seed: u64,
    exec: Execution,
) -> Result<SupReport>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    let mut points = structured.to_vec();
    points.extend(random_points(domain, n_random, seed));
    if points.is_empty() {
        return Err(Error::arg("no sample points"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != domain.len()) {
        return Err(Error::dim(format!(
            "sample point has {} coordinates, domain has {}",
            p.len(),
            domain.len()
        )));
    }
    let gaps: Vec<f64> = map_slice(&points, exec, |p| Ok((f(p)? - g(p)?).abs()))
        .into_iter()
        .collect::<Result<_>>()?;
    let (k, value) = argmax(&gaps).expect("non-empty");
    Ok(SupReport {
        value,
        witness: points[k].clone(),
        sample_count: points.len(),
        mode: Mode::Sampled,
    })
}

/// `max |f|` over `structured` and seeded random points.
pub fn sup_abs_sampled<F>(
    f: F,
    domain: &Domain,
    structured: &[Vec<f64>],
    n_random: usize,
    seed: u64,
    exec: Execution,
) -> Result<SupReport>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    sup_error_sampled(f, |_| Ok(0.0), domain, structured, n_random, seed, exec)
}

/// Midpoints of every cell hypotenuse of `mesh`, where interpolation error
/// of `xy` peaks.
pub fn hypotenuse_midpoints(mesh: &UniformMesh2D) -> Vec<Vec<f64>> {
    let (hx, hy) = (mesh.hx(), mesh.hy());
    let mut out = Vec::with_capacity(mesh.cells() * mesh.cells());
    for j in 0..mesh.cells() {
        for i in 0..mesh.cells() {
            let (x, y) = mesh.node(i, j);
            out.push(vec![x + 0.5 * hx, y + 0.5 * hy]);
        }
    }
    out
}

/// All nodes of `mesh` in row-major order.
pub fn grid_vertices(mesh: &UniformMesh2D) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(mesh.node_count());
    for j in 0..mesh.side() {
        for i in 0..mesh.side() {
            let (x, y) = mesh.node(i, j);
            out.push(vec![x, y]);
        }
    }
    out
}

/// Tensor grid with `n` points per axis spanning `domain` (endpoints included).
pub fn tensor_grid(domain: &Domain, n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for &(lo, hi) in domain {
        let axis: Vec<f64> = (0..n)
            .map(|k| {
                if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect();
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}
