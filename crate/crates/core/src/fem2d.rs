//! Two-dimensional finite-element oracle on uniform criss meshes whose
//! diagonals all run along `x + y = const`.
//!
//! Each square cell with lower-left node `(i, j)` splits into a lower
//! triangle `T+` (anchored at `(i, j)`) and an upper triangle `T-` (anchored
//! at `(i + 1, j + 1)`). Interpolation of `m(x, y) = xy`, the differences
//! `ψ_ℓ` and the reference hat are evaluated in closed form on the located
//! triangle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half of a cell a triangle is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// Lower-left triangle, `a + b <= 1` in local cell coordinates.
    Plus,
    /// Upper-right triangle, `a + b >= 1`.
    Minus,
}

/// A triangle of a mesh, identified by the node its right angle sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriangleId {
    pub i: usize,
    pub j: usize,
    pub sign: Sign,
}

impl TriangleId {
    /// Lower-left node of the containing cell.
    pub fn cell(&self) -> (usize, usize) {
        match self.sign {
            Sign::Plus => (self.i, self.j),
            Sign::Minus => (self.i - 1, self.j - 1),
        }
    }

    /// Node indices of the three corners, anchor first.
    pub fn corners(&self) -> [(usize, usize); 3] {
        let (i, j) = (self.i, self.j);
        match self.sign {
            Sign::Plus => [(i, j), (i + 1, j), (i, j + 1)],
            Sign::Minus => [(i, j), (i - 1, j), (i, j - 1)],
        }
    }
}

/// Uniform criss mesh with `cells x cells` squares over a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMesh2D {
    cells: usize,
    domain: [f64; 4],
}

impl UniformMesh2D {
    /// `domain` is `[xmin, xmax, ymin, ymax]`; `cells` must be a power of two.
    pub fn new(cells: usize, domain: [f64; 4]) -> Result<Self> {
        if !cells.is_power_of_two() {
            return Err(Error::arg(format!("cell count {cells} is not a power of two")));
        }
        let [x0, x1, y0, y1] = domain;
        if !domain.iter().all(|v| v.is_finite()) || x1 <= x0 || y1 <= y0 {
            return Err(Error::arg(format!("degenerate mesh domain {domain:?}")));
        }
        Ok(UniformMesh2D { cells, domain })
    }

    /// The level-`ℓ` mesh of `[-1, 1]^2`: `2^(ℓ+1)` cells per side, `h = 2^-ℓ`.
    pub fn reference(level: u32) -> Result<Self> {
        Self::new(cells_for(level + 1)?, [-1.0, 1.0, -1.0, 1.0])
    }

    /// The level-`ℓ` mesh restricted to `[0, 1]^2`: `2^ℓ` cells per side.
    pub fn unit_square(level: u32) -> Result<Self> {
        Self::new(cells_for(level)?, [0.0, 1.0, 0.0, 1.0])
    }

    /// Mesh described by the FEM file format: `2^(ℓ+1)` cells on `domain`.
    pub fn from_format(level: u32, domain: [f64; 4]) -> Result<Self> {
        Self::new(cells_for(level + 1)?, domain)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn domain(&self) -> [f64; 4] {
        self.domain
    }

    pub fn hx(&self) -> f64 {
        (self.domain[1] - self.domain[0]) / self.cells as f64
    }

    pub fn hy(&self) -> f64 {
        (self.domain[3] - self.domain[2]) / self.cells as f64
    }

    /// Nodes per side, `cells + 1`.
    pub fn side(&self) -> usize {
        self.cells + 1
    }

    pub fn node_count(&self) -> usize {
        self.side() * self.side()
    }

    /// Row-major position of node `(i, j)`.
    pub fn node_index(&self, i: usize, j: usize) -> usize {
        j * self.side() + i
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.domain[0] + i as f64 * self.hx(),
            self.domain[2] + j as f64 * self.hy(),
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let [x0, x1, y0, y1] = self.domain;
        (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
    }

    fn check(&self, x: f64, y: f64) -> Result<()> {
        if self.contains(x, y) {
            Ok(())
        } else {
            Err(Error::Domain {
                point: vec![x, y],
                domain: format!("{:?}", self.domain),
            })
        }
    }

    /// Cell indices whose closed interval contains the scaled coordinate.
    fn cell_candidates(&self, t: f64) -> [Option<usize>; 2] {
        let n = self.cells;
        let f = t.floor();
        let k = (f.max(0.0) as usize).min(n - 1);
        if f == t && k > 0 && (t as usize) == k {
            [Some(k - 1), Some(k)]
        } else {
            [Some(k), None]
        }
    }

    /// Local coordinates of `(x, y)` in cell `(ci, cj)`.
    fn local(&self, ci: usize, cj: usize, x: f64, y: f64) -> (f64, f64) {
        let a = (x - self.domain[0]) / self.hx() - ci as f64;
        let b = (y - self.domain[2]) / self.hy() - cj as f64;
        (a, b)
    }

    /// Triangle containing `(x, y)`. On shared edges `T+` wins, then the
    /// lowest row-major cell index.
    pub fn locate(&self, x: f64, y: f64) -> Result<TriangleId> {
        self.check(x, y)?;
        let tx = (x - self.domain[0]) / self.hx();
        let ty = (y - self.domain[2]) / self.hy();
        let mut best: Option<(bool, usize, TriangleId)> = None;
        for cj in self.cell_candidates(ty).into_iter().flatten() {
            for ci in self.cell_candidates(tx).into_iter().flatten() {
                let (a, b) = (tx - ci as f64, ty - cj as f64);
                let s = a + b;
                let sign = if s <= 1.0 { Sign::Plus } else { Sign::Minus };
                let id = match sign {
                    Sign::Plus => TriangleId { i: ci, j: cj, sign },
                    Sign::Minus => TriangleId { i: ci + 1, j: cj + 1, sign },
                };
                let key = (sign == Sign::Minus, cj * self.cells + ci);
                if best.is_none_or(|(m, c, _)| key < (m, c)) {
                    best = Some((key.0, key.1, id));
                }
            }
        }
        Ok(best.expect("point inside the hull has a cell").2)
    }

    /// Barycentric weights of `(x, y)` for the corners of `tri`, in
    /// [`TriangleId::corners`] order.
    pub fn barycentric(&self, tri: TriangleId, x: f64, y: f64) -> [f64; 3] {
        let (ci, cj) = tri.cell();
        let (a, b) = self.local(ci, cj, x, y);
        match tri.sign {
            Sign::Plus => [1.0 - a - b, a, b],
            // mirrored coordinates measured from the upper-right anchor
            Sign::Minus => {
                let (a, b) = (1.0 - a, 1.0 - b);
                [1.0 - a - b, a, b]
            }
        }
    }
}

fn cells_for(exp: u32) -> Result<usize> {
    if exp > 30 {
        return Err(Error::arg(format!("mesh level too fine: 2^{exp} cells")));
    }
    Ok(1usize << exp)
}

/// `Π_ℓ m` at `(x, y)` on the level-`ℓ` mesh of `[-1, 1]^2`: with anchor
/// `(x_a, y_a)` of the containing triangle, `x y_a + y x_a - x_a y_a`.
pub fn interp_xy(level: u32, x: f64, y: f64) -> Result<f64> {
    let mesh = UniformMesh2D::reference(level)?;
    let tri = mesh.locate(x, y)?;
    let (xa, ya) = mesh.node(tri.i, tri.j);
    Ok(x * ya + y * xa - xa * ya)
}

/// `ψ_ℓ = (Π_ℓ - Π_{ℓ-1}) m` for `ℓ >= 1`.
pub fn psi_ref(level: u32, x: f64, y: f64) -> Result<f64> {
    if level == 0 {
        return Err(Error::arg("ψ_ℓ needs ℓ >= 1"));
    }
    Ok(interp_xy(level, x, y)? - interp_xy(level - 1, x, y)?)
}

/// Reference hat: `4 ψ_1` on `[0, 1]^2`, zero elsewhere. It is the nodal
/// basis function of `(1/2, 1/2)` on the mesh of size `1/2`.
pub fn hat_ref(x: f64, y: f64) -> f64 {
    if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
        4.0 * psi_ref(1, x, y).expect("point lies in [0,1]^2")
    } else {
        0.0
    }
}

/// Piecewise-linear function given by its nodal values on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FemFunction2D {
    mesh: UniformMesh2D,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FemDoc {
    level: u32,
    domain: [f64; 4],
    values: Vec<f64>,
}

impl FemFunction2D {
    /// `values` is row-major: node `(i, j)` at `j * (cells + 1) + i`.
    pub fn new(mesh: UniformMesh2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(Error::dim(format!(
                "mesh has {} nodes, got {} values",
                mesh.node_count(),
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::arg("nodal values must be finite"));
        }
        Ok(FemFunction2D { mesh, values })
    }

    /// Nodal interpolant of `u`.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(mesh: UniformMesh2D, u: F) -> Self {
        let mut values = Vec::with_capacity(mesh.node_count());
        for j in 0..mesh.side() {
            for i in 0..mesh.side() {
                let (x, y) = mesh.node(i, j);
                values.push(u(x, y));
            }
        }
        FemFunction2D { mesh, values }
    }

    /// Nodal values drawn uniformly from `[-1, 1]`.
    pub fn random(mesh: UniformMesh2D, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..mesh.node_count())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        FemFunction2D { mesh, values }
    }

    pub fn mesh(&self) -> &UniformMesh2D {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.node_index(i, j)]
    }

    /// Parse the FEM document `{ "level", "domain", "values" }`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FemDoc = serde_json::from_str(text)?;
        let mesh = UniformMesh2D::from_format(doc.level, doc.domain)
            .map_err(|e| Error::parse("level/domain", e.to_string()))?;
        Self::new(mesh, doc.values).map_err(|e| Error::parse("values", e.to_string()))
    }

    /// Serialize in the FEM document format. Fails when the mesh does not
    /// have `2^(ℓ+1)` cells for some `ℓ >= 0`.
    pub fn to_json(&self) -> Result<String> {
        let cells = self.mesh.cells();
        if cells < 2 {
            return Err(Error::arg("the file format needs at least two cells per side"));
        }
        let doc = FemDoc {
            level: cells.trailing_zeros() - 1,
            domain: self.mesh.domain(),
            values: self.values.clone(),
        };
        Ok(serde_json::to_string(&doc).expect("FEM documents always serialize"))
    }
}

/// Barycentric evaluation of `f` at `(x, y)`.
pub fn fem_eval(f: &FemFunction2D, x: f64, y: f64) -> Result<f64> {
    let tri = f.mesh.locate(x, y)?;
    let w = f.mesh.barycentric(tri, x, y);
    Ok(tri
        .corners()
        .iter()
        .zip(w)
        .map(|(&(i, j), wk)| wk * f.value(i, j))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_examples() {
        let m0 = UniformMesh2D::reference(0).unwrap();
        let t = m0.locate(0.25, 0.25).unwrap();
        assert_eq!((t.sign, m0.node(t.i, t.j)), (Sign::Plus, (0.0, 0.0)));
        let t = m0.locate(0.75, 0.75).unwrap();
        assert_eq!((t.sign, m0.node(t.i, t.j)), (Sign::Minus, (1.0, 1.0)));
        let m1 = UniformMesh2D::reference(1).unwrap();
        let t = m1.locate(-0.25, 0.6).unwrap();
        assert_eq!((t.sign, m1.node(t.i, t.j)), (Sign::Plus, (-0.5, 0.5)));
    }

    #[test]
    fn locate_ties() {
        let m0 = UniformMesh2D::reference(0).unwrap();
        // on a hypotenuse
        let t = m0.locate(0.5, 0.5).unwrap();
        assert_eq!((t.i, t.j, t.sign), (1, 1, Sign::Plus));
        // on a vertical edge both neighbours hold it; only the right cell has it in T+
        let t = m0.locate(0.0, 0.5).unwrap();
        assert_eq!((t.i, t.j, t.sign), (1, 1, Sign::Plus));
        // a node shared by four cells
        let t = m0.locate(0.0, 0.0).unwrap();
        assert_eq!((t.i, t.j, t.sign), (1, 0, Sign::Plus));
        // the far corner only lies in T-
        let t = m0.locate(1.0, 1.0).unwrap();
        assert_eq!((t.i, t.j, t.sign), (2, 2, Sign::Minus));
    }

    #[test]
    fn locate_outside_is_domain_error() {
        let m = UniformMesh2D::reference(2).unwrap();
        assert!(matches!(m.locate(1.5, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn interp_xy_examples() {
        assert_eq!(interp_xy(0, 0.5, 0.5).unwrap(), 0.0);
        let m = UniformMesh2D::reference(3).unwrap();
        for j in 0..m.side() {
            for i in 0..m.side() {
                let (x, y) = m.node(i, j);
                assert_eq!(interp_xy(3, x, y).unwrap(), x * y);
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_ref(1, 0.5, 0.5).unwrap(), 0.25);
        assert_eq!(psi_ref(2, 0.5, -1.0).unwrap(), 0.0);
        assert!(psi_ref(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat_ref(0.5, 0.5), 1.0);
        assert_eq!(hat_ref(1.5, 1.5), 0.0);
        assert_eq!(hat_ref(0.5, 0.0), 0.0);
        assert_eq!(hat_ref(0.25, 0.25), 0.0);
        assert_eq!(hat_ref(0.25, 0.5), 0.5);
        // corners of [0,1]^2 lie outside the hexagonal support
        assert_eq!(hat_ref(0.1, 0.1), 0.0);
    }

    #[test]
    fn fem_eval_lagrange_and_partition() {
        let mesh = UniformMesh2D::unit_square(2).unwrap();
        let ones = FemFunction2D::new(mesh, vec![1.0; mesh.node_count()]).unwrap();
        assert!((fem_eval(&ones, 0.3, 0.7).unwrap() - 1.0).abs() < 1e-15);
        let mut v = vec![0.0; mesh.node_count()];
        v[mesh.node_index(2, 1)] = 1.0;
        let f = FemFunction2D::new(mesh, v).unwrap();
        assert_eq!(fem_eval(&f, 0.5, 0.25).unwrap(), 1.0);
        assert_eq!(fem_eval(&f, 0.75, 0.25).unwrap(), 0.0);
        assert_eq!(fem_eval(&f, 0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn fem_eval_matches_interp_xy() {
        let mesh = UniformMesh2D::reference(2).unwrap();
        let f = FemFunction2D::from_fn(mesh, |x, y| x * y);
        for &(x, y) in &[(0.1, 0.2), (-0.9, 0.33), (0.61, -0.4), (0.875, 0.875)] {
            let a = fem_eval(&f, x, y).unwrap();
            let b = interp_xy(2, x, y).unwrap();
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn fem_json_round_trip() {
        let mesh = UniformMesh2D::from_format(1, [0.0, 2.0, -1.0, 1.0]).unwrap();
        let f = FemFunction2D::random(mesh, 9);
        let back = FemFunction2D::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn fem_json_rejects_wrong_count() {
        let text = r#"{"level":0,"domain":[0,1,0,1],"values":[1,2,3]}"#;
        assert!(matches!(FemFunction2D::from_json(text), Err(Error::Parse { .. })));
    }
}
