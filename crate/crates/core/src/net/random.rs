use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::affine::{AffineMap, Matrix};
use super::skip::{SkipLayer, SkipNetwork};
use crate::error::{Error, Result};

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for r in 0..rows {
        for v in m.row_mut(r) {
            *v = rng.random_range(-1.0..=1.0);
        }
    }
    m
}

/// Skip network with every weight and bias drawn uniformly from `[-1, 1]`.
/// Deterministic for a given seed.
pub fn random_skip_network(seed: u64, input_dim: usize, widths: &[usize]) -> Result<SkipNetwork> {
    if widths.is_empty() {
        return Err(Error::arg("random network needs at least one hidden layer"));
    }
    if widths.contains(&0) {
        return Err(Error::arg("hidden widths must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(widths.len());
    let mut prev = 0;
    for &n in widths {
        let input = random_matrix(&mut rng, n, input_dim);
        let carry = random_matrix(&mut rng, n, prev);
        let bias = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        layers.push(SkipLayer::new(input, carry, bias)?);
        prev = n;
    }
    let total = input_dim + widths.iter().sum::<usize>();
    let out = random_matrix(&mut rng, 1, total);
    let bias = rng.random_range(-1.0..=1.0);
    SkipNetwork::new(input_dim, layers, AffineMap::new(out, vec![bias])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_weights() {
        let a = random_skip_network(42, 2, &[3, 3]).unwrap();
        let b = random_skip_network(42, 2, &[3, 3]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = random_skip_network(0, 2, &[3, 3]).unwrap();
        let b = random_skip_network(1, 2, &[3, 3]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn output_reads_input_and_all_layers() {
        let net = random_skip_network(5, 2, &[3, 3]).unwrap();
        assert_eq!(net.output().input_dim(), 8);
        let row = net.output().weights().row(0);
        assert!(row.iter().all(|w| (-1.0..=1.0).contains(w)));
    }

    #[test]
    fn empty_widths_rejected() {
        assert!(random_skip_network(0, 1, &[]).is_err());
    }
}
