//! The tent map `g`, its compositions `g_ℓ`, `ReLU1` and the x² network `ŝ_L`.

use crate::error::{Error, Result};
use crate::net::{AffineMap, Matrix, MlpNetwork, SkipLayer, SkipNetwork};

/// Weights of `g(t) = 2 relu(t) - 4 relu(t - 1/2) + 2 relu(t - 1)`.
pub(crate) const G_OUT: [f64; 3] = [2.0, -4.0, 2.0];
pub(crate) const G_BIAS: [f64; 3] = [0.0, -0.5, -1.0];

fn map(rows: &[Vec<f64>], bias: &[f64]) -> AffineMap {
    let cols = rows.first().map_or(0, Vec::len);
    AffineMap::from_rows(rows, cols, bias.to_vec()).expect("static shapes")
}

/// `g` as a plain network of width 3.
pub fn build_g() -> MlpNetwork {
    build_g_ell(1).expect("level 1 is valid")
}

/// `g_ℓ = g o g_(ℓ-1)`: ℓ hidden layers of width 3.
pub fn build_g_ell(level: usize) -> Result<MlpNetwork> {
    if level < 1 {
        return Err(Error::arg("g_ℓ needs ℓ >= 1"));
    }
    let mut hidden = vec![map(&[vec![1.0], vec![1.0], vec![1.0]], &G_BIAS)];
    for _ in 1..level {
        hidden.push(map(&[G_OUT.to_vec(), G_OUT.to_vec(), G_OUT.to_vec()], &G_BIAS));
    }
    MlpNetwork::new(1, hidden, map(&[G_OUT.to_vec()], &[0.0]))
}

/// `ReLU1(x) = relu(x) - relu(x - 1)`, the clamp to `[0, 1]`.
pub fn build_relu1() -> MlpNetwork {
    MlpNetwork::new(
        1,
        vec![map(&[vec![1.0], vec![1.0]], &[0.0, -1.0])],
        map(&[vec![1.0, -1.0]], &[0.0]),
    )
    .expect("static shapes")
}

/// `ŝ_L(c . x)` as a skip network of width 3 and depth `L`:
/// `|u| - Σ_{ℓ<L} 4^-ℓ g_ℓ(|u|)` with `u = c . x`.
///
/// Layer 1 holds `relu(u), relu(-u)` and an idle neuron; layer `ℓ >= 2`
/// holds `relu(t), relu(t - 1/2), relu(t - 1)` with `t = g_(ℓ-2)(|u|)`.
/// With `compact` the `relu(t - 1)` neurons are replaced by idle ones, which
/// is exact whenever `|u| <= 1`.
pub(crate) fn s_hat_block(levels: usize, coeffs: &[f64], compact: bool) -> Result<SkipNetwork> {
    if levels < 1 {
        return Err(Error::arg("ŝ_L needs L >= 1"));
    }
    let d = coeffs.len();
    let neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
    let mut layers = vec![SkipLayer::new(
        Matrix::from_rows(&[coeffs.to_vec(), neg, vec![0.0; d]], d)?,
        Matrix::zeros(3, 0),
        vec![0.0; 3],
    )?];
    let live = if compact { 2 } else { 3 };
    let mut out = vec![0.0; d];
    out.extend_from_slice(&[1.0, 1.0, 0.0]);
    for l in 2..=levels {
        // t is |u| = sum of layer 1, then g of the previous layer
        let read: [f64; 3] = if l == 2 { [1.0, 1.0, 0.0] } else { G_OUT };
        let mut carry = Matrix::zeros(3, 3);
        let mut bias = vec![0.0; 3];
        for r in 0..live {
            for (c, &w) in read.iter().enumerate() {
                if !(compact && c == 2) {
                    carry.set(r, c, w);
                }
            }
            bias[r] = G_BIAS[r];
        }
        layers.push(SkipLayer::new(Matrix::zeros(3, d), carry, bias)?);
        let h2 = (-2.0 * (l - 1) as f64).exp2();
        for (c, g) in G_OUT.iter().enumerate() {
            out.push(if c < live { -h2 * g } else { 0.0 });
        }
    }
    let cols = out.len();
    SkipNetwork::new(d, layers, AffineMap::from_rows(&[out], cols, vec![0.0])?)
}

/// `ŝ_L`, the interpolant of x² on `[-1, 1]` with mesh `2^(1-L)`, in the
/// skip class of depth `L` and width 3. Beyond `[-1, 1]` it equals `|x|`.
pub fn build_x2_hat(levels: usize) -> Result<SkipNetwork> {
    s_hat_block(levels, &[1.0], false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::ReluNet;

    fn tent(x: f64) -> f64 {
        if (0.0..=0.5).contains(&x) {
            2.0 * x
        } else if x > 0.5 && x <= 1.0 {
            2.0 - 2.0 * x
        } else {
            0.0
        }
    }

    #[test]
    fn g_values() {
        let g = build_g();
        assert_eq!(g.widths(), vec![3]);
        assert_eq!(g.depth(), 1);
        for (x, v) in [(0.5, 1.0), (-0.3, 0.0), (0.25, 0.5), (2.0, 0.0), (0.75, 0.5)] {
            assert_eq!(g.eval(&[x]).unwrap(), v);
        }
    }

    #[test]
    fn g_ell_values() {
        assert_eq!(build_g_ell(1).unwrap(), build_g());
        assert_eq!(build_g_ell(2).unwrap().eval(&[0.25]).unwrap(), 1.0);
        let g3 = build_g_ell(3).unwrap();
        let vals: Vec<f64> = (0..=8).map(|k| g3.eval(&[k as f64 / 8.0]).unwrap()).collect();
        assert_eq!(vals, vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(build_g_ell(0).is_err());
    }

    #[test]
    fn relu1_clamps() {
        let r = build_relu1();
        assert_eq!(r.eval(&[-1.0]).unwrap(), 0.0);
        assert_eq!(r.eval(&[0.4]).unwrap(), 0.4);
        assert_eq!(r.eval(&[3.0]).unwrap(), 1.0);
    }

    #[test]
    fn x2_hat_values() {
        let s1 = build_x2_hat(1).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(s1.eval(&[x]).unwrap(), f64::abs(x));
        }
        let s3 = build_x2_hat(3).unwrap();
        assert_eq!(s3.widths(), vec![3, 3, 3]);
        assert_eq!(s3.eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(s3.eval(&[1.0]).unwrap(), 1.0);
        assert_eq!(s3.eval(&[0.5]).unwrap(), 0.25);
        assert_eq!(s3.eval(&[0.125]).unwrap(), 0.03125);
        assert!(build_x2_hat(0).is_err());
    }

    #[test]
    fn x2_hat_matches_sawtooth_sum() {
        let l = 5;
        let net = build_x2_hat(l).unwrap();
        for k in 0..=200 {
            let x = -2.0 + 4.0 * k as f64 / 200.0;
            let mut g = x.abs();
            let mut expected = x.abs();
            for j in 1..l {
                g = tent(g);
                expected -= (-2.0 * j as f64).exp2() * g;
            }
            assert!((net.eval(&[x]).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn compact_block_agrees_on_unit_ball() {
        let full = s_hat_block(4, &[0.5, 0.5], false).unwrap();
        let compact = s_hat_block(4, &[0.5, 0.5], true).unwrap();
        for k in 0..=40 {
            let x = [-1.0 + k as f64 / 20.0, 1.0 - k as f64 / 40.0];
            assert_eq!(full.eval(&x).unwrap(), compact.eval(&x).unwrap());
        }
    }
}
