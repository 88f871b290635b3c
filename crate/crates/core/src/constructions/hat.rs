//! Two-dimensional constructions: `ψ_ℓ`, the finite-element hat `φ` and
//! sums of transformed hats.

use super::sawtooth::{G_BIAS, G_OUT};
use crate::error::{Error, Result};
use crate::fem2d::FemFunction2D;
use crate::net::{AffineMap, Matrix, MlpNetwork};
use crate::parallel::{map_slice, Execution};

/// `g_2(t) = Σ_k α_k relu(t - k/4)`.
const G2_ALPHA: [f64; 5] = [4.0, -8.0, 8.0, -8.0, 4.0];

/// Width of the hat network.
pub const HAT_WIDTH: usize = 15;

/// `ψ_ℓ = 2 h_(ℓ+1)^2 (g_(ℓ+1)(|x|/2) + g_(ℓ+1)(|y|/2) - g_(ℓ+1)(|x+y|/2))`
/// as a plain network of depth `ℓ + 2` and width 9: three width-3 sawtooth
/// chains side by side behind a layer of ReLU pairs for `|x|, |y|, |x+y|`.
pub fn build_psi_ell(level: usize) -> Result<MlpNetwork> {
    if level < 1 {
        return Err(Error::arg("ψ_ℓ needs ℓ >= 1"));
    }
    let forms = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
    let mut first = Matrix::zeros(9, 2);
    for (c, f) in forms.iter().enumerate() {
        first.row_mut(2 * c).copy_from_slice(f);
        first.row_mut(2 * c + 1).copy_from_slice(&[-f[0], -f[1]]);
    }
    let mut hidden = vec![AffineMap::new(first, vec![0.0; 9])?];
    // layer 2 reads |v|/2 from the pairs, later layers g of the previous chain
    let mut second = Matrix::zeros(9, 9);
    for c in 0..3 {
        for r in 0..3 {
            second.set(3 * c + r, 2 * c, 0.5);
            second.set(3 * c + r, 2 * c + 1, 0.5);
        }
    }
    hidden.push(AffineMap::new(second, G_BIAS.repeat(3))?);
    for _ in 0..level {
        let mut m = Matrix::zeros(9, 9);
        for c in 0..3 {
            for r in 0..3 {
                for (k, g) in G_OUT.iter().enumerate() {
                    m.set(3 * c + r, 3 * c + k, *g);
                }
            }
        }
        hidden.push(AffineMap::new(m, G_BIAS.repeat(3))?);
    }
    let scale = 2.0 * (-2.0 * (level as f64 + 1.0)).exp2();
    let mut out = Vec::with_capacity(9);
    for sign in [1.0, 1.0, -1.0] {
        out.extend(G_OUT.iter().map(|g| sign * scale * g));
    }
    MlpNetwork::new(2, hidden, AffineMap::from_rows(&[out], 9, vec![0.0])?)
}

/// Invertible affine map `T(p) = A p + s` and the coefficient of the hat
/// `φ(T(x, y))` in a sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatPlacement {
    matrix: [[f64; 2]; 2],
    shift: [f64; 2],
    coeff: f64,
}

impl HatPlacement {
    pub fn new(matrix: [[f64; 2]; 2], shift: [f64; 2], coeff: f64) -> Result<Self> {
        let finite = matrix.iter().flatten().chain(&shift).all(|v| v.is_finite());
        if !finite || !coeff.is_finite() {
            return Err(Error::arg("hat placement entries must be finite"));
        }
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        if det == 0.0 {
            return Err(Error::arg(format!("hat placement map {matrix:?} is singular")));
        }
        Ok(HatPlacement { matrix, shift, coeff })
    }

    /// `φ` itself scaled by `coeff`.
    pub fn identity(coeff: f64) -> Result<Self> {
        Self::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], coeff)
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.matrix
    }

    pub fn shift(&self) -> [f64; 2] {
        self.shift
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let [[a, b], [c, d]] = self.matrix;
        (a * x + b * y + self.shift[0], c * x + d * y + self.shift[1])
    }
}

/// Layer-1 rows, layer-2 rows and output weights of one placed hat.
///
/// Layer 1: `relu(u), relu(u - 1), relu(v), relu(v - 1)` for `(u, v) = T(x, y)`.
/// Layer 2: `g_2` expansions at `r_u/2`, `r_v/2`, `(r_u + r_v)/2` where
/// `r = ReLU1` is read off the first layer.
struct HatBlock {
    first: Vec<([f64; 2], f64)>,
    second: Vec<([f64; 4], f64)>,
    out: Vec<f64>,
}

fn hat_block(p: &HatPlacement) -> HatBlock {
    let [row_u, row_v] = p.matrix;
    let [su, sv] = p.shift;
    let first = vec![(row_u, su), (row_u, su - 1.0), (row_v, sv), (row_v, sv - 1.0)];
    let ru = [1.0, -1.0, 0.0, 0.0];
    let rv = [0.0, 0.0, 1.0, -1.0];
    let mut second = Vec::with_capacity(HAT_WIDTH);
    let mut out = Vec::with_capacity(HAT_WIDTH);
    for (arg, sign) in [(ru, 1.0), (rv, 1.0), ([1.0, -1.0, 1.0, -1.0], -1.0)] {
        let half = arg.map(|w| 0.5 * w);
        for (k, alpha) in G2_ALPHA.iter().enumerate() {
            second.push((half, -(k as f64) / 4.0));
            out.push(0.5 * sign * alpha * p.coeff);
        }
    }
    HatBlock { first, second, out }
}

fn stack_hats(blocks: &[HatBlock], first_width: usize) -> Result<MlpNetwork> {
    let n = blocks.len();
    let mut w1 = Matrix::zeros(first_width, 2);
    let mut b1 = vec![0.0; first_width];
    let mut w2 = Matrix::zeros(HAT_WIDTH * n, first_width);
    let mut b2 = vec![0.0; HAT_WIDTH * n];
    let mut out = Vec::with_capacity(HAT_WIDTH * n);
    for (i, block) in blocks.iter().enumerate() {
        for (r, (w, b)) in block.first.iter().enumerate() {
            w1.row_mut(4 * i + r).copy_from_slice(w);
            b1[4 * i + r] = *b;
        }
        for (r, (w, b)) in block.second.iter().enumerate() {
            let row = HAT_WIDTH * i + r;
            w2.row_mut(row)[4 * i..4 * i + 4].copy_from_slice(w);
            b2[row] = *b;
        }
        out.extend_from_slice(&block.out);
    }
    let cols = out.len();
    MlpNetwork::new(
        2,
        vec![AffineMap::new(w1, b1)?, AffineMap::new(w2, b2)?],
        AffineMap::from_rows(&[out], cols, vec![0.0])?,
    )
}

/// The hat `φ` of the node `(1/2, 1/2)` on the mesh of size `1/2` of
/// `[0, 1]^2`, exact on all of `R^2`:
/// `φ = (g_2(r(x)/2) + g_2(r(y)/2) - g_2((r(x) + r(y))/2)) / 2` with
/// `r = ReLU1`. Two hidden layers of width 15.
pub fn build_hat2d() -> MlpNetwork {
    let block = hat_block(&HatPlacement::identity(1.0).expect("identity is invertible"));
    stack_hats(&[block], HAT_WIDTH).expect("static shapes")
}

/// `(g_2(x/2) + g_2(y/2) - g_2((x + y)/2)) / 2` with no clamping of the
/// inputs: one hidden layer of width 15. It agrees with `φ` on `[0, 1]^2`
/// only.
pub fn build_hat2d_unguarded() -> MlpNetwork {
    let mut w = Matrix::zeros(HAT_WIDTH, 2);
    let mut b = vec![0.0; HAT_WIDTH];
    let mut out = Vec::with_capacity(HAT_WIDTH);
    for (c, (form, sign)) in [([0.5, 0.0], 1.0), ([0.0, 0.5], 1.0), ([0.5, 0.5], -1.0)]
        .into_iter()
        .enumerate()
    {
        for (k, alpha) in G2_ALPHA.iter().enumerate() {
            w.row_mut(5 * c + k).copy_from_slice(&form);
            b[5 * c + k] = -(k as f64) / 4.0;
            out.push(0.5 * sign * alpha);
        }
    }
    MlpNetwork::new(
        2,
        vec![AffineMap::new(w, b).expect("static shapes")],
        AffineMap::from_rows(&[out], HAT_WIDTH, vec![0.0]).expect("static shapes"),
    )
    .expect("static shapes")
}

/// `Σ μ_i φ(T_i(x, y))` with two hidden layers of widths `4N` and `15N`.
pub fn build_fem2d(placements: &[HatPlacement]) -> Result<MlpNetwork> {
    build_fem2d_with(placements, Execution::default())
}

/// [`build_fem2d`] with an explicit execution mode for the per-hat blocks.
pub fn build_fem2d_with(placements: &[HatPlacement], exec: Execution) -> Result<MlpNetwork> {
    if placements.is_empty() {
        return Err(Error::arg("need at least one hat placement"));
    }
    let blocks = map_slice(placements, exec, hat_block);
    stack_hats(&blocks, 4 * placements.len())
}

/// One placement per node with a nonzero value: the map sends the node to
/// `(1/2, 1/2)` and its neighbours to the support of `φ`.
pub fn fem_to_placements(f: &FemFunction2D) -> Vec<HatPlacement> {
    let mesh = f.mesh();
    let (sx, sy) = (0.5 / mesh.hx(), 0.5 / mesh.hy());
    let mut out = Vec::new();
    for j in 0..mesh.side() {
        for i in 0..mesh.side() {
            let mu = f.value(i, j);
            if mu == 0.0 {
                continue;
            }
            let (x, y) = mesh.node(i, j);
            out.push(
                HatPlacement::new([[sx, 0.0], [0.0, sy]], [0.5 - x * sx, 0.5 - y * sy], mu)
                    .expect("mesh sizes are positive"),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem2d::{fem_eval, hat_ref, psi_ref, UniformMesh2D};
    use crate::net::ReluNet;
    use crate::pwl::random_points;

    #[test]
    fn psi_shape_and_value() {
        let psi = build_psi_ell(3).unwrap();
        assert_eq!(psi.depth(), 5);
        assert_eq!(psi.width(), 9);
        assert_eq!(build_psi_ell(1).unwrap().eval(&[0.5, 0.5]).unwrap(), 0.25);
        assert!(build_psi_ell(0).is_err());
    }

    #[test]
    fn psi_matches_reference() {
        for l in 1..=3 {
            let psi = build_psi_ell(l).unwrap();
            for p in random_points(&[(-1.0, 1.0), (-1.0, 1.0)], 500, l as u64) {
                let want = psi_ref(l as u32, p[0], p[1]).unwrap();
                assert!((psi.eval(&p).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hat_examples() {
        let hat = build_hat2d();
        assert_eq!(hat.widths(), vec![15, 15]);
        assert_eq!(hat.eval(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(hat.eval(&[1.5, 1.5]).unwrap(), 0.0);
        assert_eq!(hat.eval(&[-0.2, 0.3]).unwrap(), 0.0);
        for p in random_points(&[(-2.0, 2.0), (-2.0, 2.0)], 1000, 4) {
            assert!((hat.eval(&p).unwrap() - hat_ref(p[0], p[1])).abs() < 1e-15);
        }
    }

    #[test]
    fn unguarded_formula_away_from_unit_square() {
        let raw = build_hat2d_unguarded();
        assert_eq!(raw.depth(), 1);
        // g_2(3/4) = 1 and g_2(3/2) = 0
        assert_eq!(raw.eval(&[1.5, 1.5]).unwrap(), 1.0);
        assert_eq!(raw.eval(&[1.25, 1.25]).unwrap(), 0.5);
        for p in random_points(&[(0.0, 1.0), (0.0, 1.0)], 200, 2) {
            assert!((raw.eval(&p).unwrap() - hat_ref(p[0], p[1])).abs() < 1e-15);
        }
    }

    #[test]
    fn fem_single_identity_placement() {
        let net = build_fem2d(&[HatPlacement::identity(2.0).unwrap()]).unwrap();
        assert_eq!(net.widths(), vec![4, 15]);
        for p in random_points(&[(-1.0, 2.0), (-1.0, 2.0)], 300, 6) {
            assert!((net.eval(&p).unwrap() - 2.0 * hat_ref(p[0], p[1])).abs() < 1e-15);
        }
    }

    #[test]
    fn placements_for_interior_node() {
        let mesh = UniformMesh2D::unit_square(1).unwrap();
        let mut values = vec![0.0; 9];
        values[mesh.node_index(1, 1)] = 3.0;
        let f = FemFunction2D::new(mesh, values).unwrap();
        let ps = fem_to_placements(&f);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].matrix(), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(ps[0].shift(), [0.0, 0.0]);
        assert_eq!(ps[0].coeff(), 3.0);
    }

    #[test]
    fn fem_round_trip() {
        let mesh = UniformMesh2D::unit_square(2).unwrap();
        let f = FemFunction2D::random(mesh, 3);
        let ps = fem_to_placements(&f);
        assert_eq!(ps.len(), 25);
        let net = build_fem2d(&ps).unwrap();
        assert_eq!(net.widths(), vec![100, 375]);
        for p in random_points(&[(0.0, 1.0), (0.0, 1.0)], 500, 9) {
            let want = fem_eval(&f, p[0], p[1]).unwrap();
            assert!((net.eval(&p).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_placement_rejected() {
        assert!(HatPlacement::new([[1.0, 2.0], [2.0, 4.0]], [0.0, 0.0], 1.0).is_err());
    }
}
