//! Data tables behind the error curves and function plots: one CSV per
//! table plus a README describing the columns.

use std::fmt::Write as _;

use crate::constructions::{build_g_ell, build_monomial, build_psi_ell, build_x2_hat, build_xy_hat, Monomial};
use crate::error::Result;
use crate::fem2d::UniformMesh2D;
use crate::net::ReluNet;
use crate::parallel::Execution;
use crate::pwl::{
    extract_pwl_with, grid_vertices, hypotenuse_midpoints, sup_abs_sampled, sup_error_sampled,
    sup_error_vs_quadratic, tensor_grid, w1inf_error_vs_quadratic,
};
use crate::verify::fmt_f64;

/// Settings for [`build_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportParams {
    pub seed: u64,
    /// Random points per sampled error.
    pub samples: usize,
    pub exec: Execution,
}

impl Default for ReportParams {
    fn default() -> Self {
        ReportParams { seed: 0, samples: 10_000, exec: Execution::default() }
    }
}

/// A named CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub contents: String,
}

fn table(file: &str, header: &str, rows: Vec<String>) -> Table {
    let mut contents = format!("{header}\n");
    for r in rows {
        let _ = writeln!(contents, "{r}");
    }
    Table { file: file.to_string(), contents }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

pub const README: &str = "\
# Report tables

All floats are written with 17 significant digits, '.' as decimal separator
and LF line endings. Sampled columns use seeded random points plus the
structured points listed below, so a fixed seed reproduces every file.

x2_curve.csv
  level, error_linf, bound_linf, error_w1inf, bound_w1inf
  Exact errors of the x^2 network on [-1, 1] (bounds 2^(-2L), 2^(-(L-1))).

xy_curve.csv
  bound_m, level, error_linf, bound_linf, max_abs
  Sampled sup error of the product network on [-M, M]^2 against xy over
  hypotenuse midpoints and vertices of the level-(L-2) mesh plus random
  points; bound M^2 2^(-2(L-1)); max_abs is the sampled sup of |m_L|.

monomial_curve.csv
  exponents, degree, level, error_linf, bound_linf, max_abs
  Sampled sup error of monomial networks on [-1, 1]^d over a tensor grid
  plus random points; bound (p-1) 2^(-2(L-1)).

g_ell.csv
  x, g_1, g_2, g_3, g_4
  The sawtooth iterates g_l on a grid of [0, 1] with step 1/64.

psi.csv
  level, x, y, psi, psi_scaled
  psi_l on the vertices of the level-(l+1) mesh of [-1, 1]^2; psi_scaled is
  h_l^(-2) psi_l with h_l = 2^(-l).

psi_norm.csv
  level, max_abs_scaled
  Sampled sup of |h_l^(-2) psi_l| (equals 1 for every level).
";

/// Build every table.
pub fn build_report(params: &ReportParams) -> Result<Vec<Table>> {
    let exec = params.exec;
    let mut out = Vec::new();

    let mut rows = Vec::new();
    for l in 1..=8 {
        let f = extract_pwl_with(&build_x2_hat(l)?, -1.0, 1.0, exec)?;
        let linf = sup_error_vs_quadratic(&f, -1.0, 1.0)?.value;
        let w1 = w1inf_error_vs_quadratic(&f, -1.0, 1.0)?.value;
        let lf = l as f64;
        rows.push(format!("{l},{}", join(&[linf, (-2.0 * lf).exp2(), w1, (1.0 - lf).exp2()])));
    }
    out.push(table("x2_curve.csv", "level,error_linf,bound_linf,error_w1inf,bound_w1inf", rows));

    let mut rows = Vec::new();
    for m in [1.0, 2.5] {
        let dom = [(-m, m), (-m, m)];
        for l in 2..=8 {
            let net = build_xy_hat(l, m)?;
            let mesh = UniformMesh2D::reference(l as u32 - 2)?;
            let structured: Vec<Vec<f64>> = hypotenuse_midpoints(&mesh)
                .into_iter()
                .chain(grid_vertices(&mesh))
                .map(|p| vec![p[0] * m, p[1] * m])
                .collect();
            let seed = params.seed ^ (l as u64);
            let err = sup_error_sampled(|p| net.eval(p), |p| Ok(p[0] * p[1]), &dom, &structured, params.samples, seed, exec)?;
            let abs = sup_abs_sampled(|p| net.eval(p), &dom, &structured, params.samples, seed, exec)?;
            let bound = m * m * (-2.0 * (l as f64 - 1.0)).exp2();
            rows.push(format!("{},{l},{}", fmt_f64(m), join(&[err.value, bound, abs.value])));
        }
    }
    out.push(table("xy_curve.csv", "bound_m,level,error_linf,bound_linf,max_abs", rows));

    let mut rows = Vec::new();
    for k in [vec![2], vec![3], vec![1, 1], vec![2, 1], vec![1, 1, 1], vec![2, 1, 1, 1]] {
        let m = Monomial::new(k.clone())?;
        let dom = vec![(-1.0, 1.0); k.len()];
        let grid = tensor_grid(&dom, 5);
        for l in 2..=6 {
            let net = build_monomial(&m, l)?;
            let seed = params.seed ^ (100 + l as u64);
            let err = sup_error_sampled(|x| net.eval(x), |x| Ok(m.eval(x)), &dom, &grid, params.samples, seed, exec)?;
            let abs = sup_abs_sampled(|x| net.eval(x), &dom, &grid, params.samples, seed, exec)?;
            let label = k.iter().map(u32::to_string).collect::<Vec<_>>().join("-");
            rows.push(format!("{label},{},{l},{}", m.degree(), join(&[err.value, m.error_bound(l), abs.value])));
        }
    }
    out.push(table("monomial_curve.csv", "exponents,degree,level,error_linf,bound_linf,max_abs", rows));

    let nets = (1..=4).map(build_g_ell).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for i in 0..=64 {
        let x = i as f64 / 64.0;
        let vals = nets.iter().map(|n| n.eval(&[x])).collect::<Result<Vec<_>>>()?;
        rows.push(format!("{},{}", fmt_f64(x), join(&vals)));
    }
    out.push(table("g_ell.csv", "x,g_1,g_2,g_3,g_4", rows));

    let mut rows = Vec::new();
    let mut norms = Vec::new();
    for l in 1..=4 {
        let net = build_psi_ell(l)?;
        let scale = (2.0 * l as f64).exp2();
        let vertices = grid_vertices(&UniformMesh2D::reference(l as u32 + 1)?);
        for p in &vertices {
            let v = net.eval(p)?;
            rows.push(format!("{l},{}", join(&[p[0], p[1], v, v * scale])));
        }
        let dom = [(-1.0, 1.0), (-1.0, 1.0)];
        let r = sup_abs_sampled(|p| Ok(net.eval(p)? * scale), &dom, &vertices, params.samples, params.seed ^ (200 + l as u64), exec)?;
        norms.push(format!("{l},{}", fmt_f64(r.value)));
    }
    out.push(table("psi.csv", "level,x,y,psi,psi_scaled", rows));
    out.push(table("psi_norm.csv", "level,max_abs_scaled", norms));

    out.push(Table { file: "README.md".into(), contents: README.to_string() });
    Ok(out)
}
