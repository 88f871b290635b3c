//! Network algebra on skip networks: addition, modified composition and
//! conversion to plain networks.

use super::draft::{Draft, Neuron};
use crate::error::{Error, Result};
use crate::net::{AffineMap, Matrix, MlpNetwork, ReluNet, SkipLayer, SkipNetwork};

/// `f + g` with depth `L_f + L_g`: the layers of `g` follow those of `f`,
/// the first of them re-reading `x` through the skip input.
///
/// Both networks must have the same input dimension and the same width
/// (networks without hidden layers fit any width). Every layer of the sum
/// is padded to that width.
pub fn net_add(f: &SkipNetwork, g: &SkipNetwork) -> Result<SkipNetwork> {
    let d = f.input_dim();
    if g.input_dim() != d {
        return Err(Error::dim(format!(
            "cannot add networks on R^{d} and R^{}",
            g.input_dim()
        )));
    }
    let (wf, wg) = (f.width(), g.width());
    if wf > 0 && wg > 0 && wf != wg {
        return Err(Error::dim(format!("cannot add networks of widths {wf} and {wg}")));
    }
    let n = wf.max(wg);
    let f = f.padded_to(n)?;
    let g = g.padded_to(n)?;
    let mut layers = f.layers().to_vec();
    for (l, layer) in g.layers().iter().enumerate() {
        if l == 0 && !layers.is_empty() {
            layers.push(SkipLayer::new(
                layer.input_block().clone(),
                Matrix::zeros(n, n),
                layer.bias().to_vec(),
            )?);
        } else {
            layers.push(layer.clone());
        }
    }
    let mut row: Vec<f64> = f
        .output_input_block()
        .iter()
        .zip(g.output_input_block())
        .map(|(a, b)| a + b)
        .collect();
    row.extend_from_slice(&f.output().weights().row(0)[d..]);
    row.extend_from_slice(&g.output().weights().row(0)[d..]);
    let cols = row.len();
    let bias = f.output_bias() + g.output_bias();
    SkipNetwork::new(d, layers, AffineMap::from_rows(&[row], cols, vec![bias])?)
}

/// `net + w . x + b`, folded into the output map.
pub fn add_affine(net: &SkipNetwork, weights: &[f64], bias: f64) -> Result<SkipNetwork> {
    if weights.len() != net.input_dim() {
        return Err(Error::dim(format!(
            "affine part has {} weights, network has {} inputs",
            weights.len(),
            net.input_dim()
        )));
    }
    let mut row = net.output().weights().row(0).to_vec();
    for (r, w) in row.iter_mut().zip(weights) {
        *r += w;
    }
    let cols = row.len();
    SkipNetwork::new(
        net.input_dim(),
        net.layers().to_vec(),
        AffineMap::from_rows(&[row], cols, vec![net.output_bias() + bias])?,
    )
}

/// Affine expression `wx . x + wc . prev + b` over the previous result layer.
struct Expr {
    wx: Vec<f64>,
    wc: Vec<f64>,
    b: f64,
}

/// Modified composition `f2(f1(x), x)`, where `f2` reads `[x0, x]`.
///
/// The result runs the layers of `f1` and then those of `f2`, so its depth
/// is `L1 + L2`. Two kinds of helper neurons carry values across layers:
/// an accumulator holding the partial output sum of `f1` plus `shift`, and a
/// copy of `x0 + shift` for `f2` layers that read `x0` after its first
/// layer. Both pass through a ReLU unchanged only while the carried value
/// stays above `-shift`, so the result equals `f2(f1(x), x)` exactly on any
/// set where that holds; [`compose_shift`] gives a safe value for a box.
///
/// Neurons that are identically zero are removed first, which lets the
/// helpers take their place; the result is padded to a uniform width.
pub fn net_compose_modified(f2: &SkipNetwork, f1: &SkipNetwork, shift: f64) -> Result<SkipNetwork> {
    let d = f1.input_dim();
    if f2.input_dim() != d + 1 {
        return Err(Error::dim(format!(
            "outer network must read {} inputs (x0 then x), it reads {}",
            d + 1,
            f2.input_dim()
        )));
    }
    if !(shift.is_finite() && shift >= 0.0) {
        return Err(Error::arg(format!("carry shift must be finite and >= 0, got {shift}")));
    }
    let d1 = Draft::from_net(f1).drop_inert();
    let d2 = Draft::from_net(f2).drop_inert();
    let (l1, l2) = (d1.layers.len(), d2.layers.len());
    let hidden_reads = |k: usize| d1.out_layers[k].iter().any(|&w| w != 0.0);
    let x0_affine = (0..l1).all(|k| !hidden_reads(k));
    // accumulator in layer l holds the hidden partial sum through layer l - 1
    let has_acc: Vec<bool> = (0..l1).map(|l| (0..l).any(hidden_reads)).collect();

    let mut layers: Vec<Vec<Neuron>> = Vec::with_capacity(l1 + l2);
    for l in 0..l1 {
        let prev_len = layers.last().map_or(0, Vec::len);
        let mut neurons: Vec<Neuron> = d1.layers[l]
            .iter()
            .map(|n| {
                let mut wc = n.wc.clone();
                wc.resize(prev_len, 0.0);
                Neuron { wx: n.wx.clone(), wc, b: n.b }
            })
            .collect();
        if has_acc[l] {
            let mut wc = d1.out_layers[l - 1].clone();
            wc.resize(prev_len, 0.0);
            let b = if has_acc[l - 1] {
                wc[d1.layers[l - 1].len()] = 1.0;
                0.0
            } else {
                shift
            };
            neurons.push(Neuron { wx: vec![0.0; d], wc, b });
        }
        layers.push(neurons);
    }

    // x0 in terms of the last f1 layer
    let mut x0 = Expr {
        wx: d1.out_x.clone(),
        wc: Vec::new(),
        b: d1.out_b,
    };
    if l1 > 0 {
        let prev_len = layers[l1 - 1].len();
        let mut wc = d1.out_layers[l1 - 1].clone();
        wc.resize(prev_len, 0.0);
        if has_acc[l1 - 1] {
            wc[d1.layers[l1 - 1].len()] = 1.0;
            x0.b -= shift;
        }
        x0.wc = wc;
    }

    let reads_x0 = |j: usize| d2.layers[j].iter().any(|n| n.wx[0] != 0.0);
    for j in 0..l2 {
        let prev_len = layers.last().map_or(0, Vec::len);
        x0.wc.resize(prev_len, 0.0);
        let mut neurons: Vec<Neuron> = d2.layers[j]
            .iter()
            .map(|n| {
                let w0 = n.wx[0];
                let mut wc = n.wc.clone();
                wc.resize(prev_len, 0.0);
                for (c, e) in wc.iter_mut().zip(&x0.wc) {
                    *c += w0 * e;
                }
                Neuron {
                    wx: n.wx[1..].iter().zip(&x0.wx).map(|(w, e)| w + w0 * e).collect(),
                    wc,
                    b: n.b + w0 * x0.b,
                }
            })
            .collect();
        let carry_needed = !x0_affine && (j + 1..l2).any(reads_x0);
        if carry_needed {
            neurons.push(Neuron {
                wx: x0.wx.clone(),
                wc: x0.wc.clone(),
                b: x0.b + shift,
            });
            let pos = neurons.len() - 1;
            let mut wc = vec![0.0; neurons.len()];
            wc[pos] = 1.0;
            x0 = Expr {
                wx: vec![0.0; d],
                wc,
                b: -shift,
            };
        } else if !x0_affine {
            // no later layer reads x0
            x0 = Expr {
                wx: vec![0.0; d],
                wc: vec![0.0; neurons.len()],
                b: 0.0,
            };
        } else {
            x0.wc = vec![0.0; neurons.len()];
        }
        layers.push(neurons);
    }

    // output: f2's own reads, plus its direct x0 weight spread over f1
    let p0 = d2.out_x[0];
    let mut out_layers = Vec::with_capacity(l1 + l2);
    for (reads, layer) in d1.out_layers.iter().zip(&layers) {
        let mut block: Vec<f64> = reads.iter().map(|w| p0 * w).collect();
        block.resize(layer.len(), 0.0);
        out_layers.push(block);
    }
    for j in 0..l2 {
        let mut block = d2.out_layers[j].clone();
        block.resize(layers[l1 + j].len(), 0.0);
        out_layers.push(block);
    }
    Draft {
        d,
        layers,
        out_x: d2.out_x[1..].iter().zip(&d1.out_x).map(|(a, b)| a + p0 * b).collect(),
        out_layers,
        out_b: d2.out_b + p0 * d1.out_b,
    }
    .finish(0)
}

fn interval_dot(w: &[f64], v: &[(f64, f64)]) -> (f64, f64) {
    w.iter().zip(v).fold((0.0, 0.0), |(lo, hi), (&w, &(a, b))| {
        if w >= 0.0 {
            (lo + w * a, hi + w * b)
        } else {
            (lo + w * b, hi + w * a)
        }
    })
}

/// A shift for [`net_compose_modified`] that is safe on `domain`: one more
/// than the largest negative excursion of any partial output sum of `f1`
/// (and of `f1` itself), bounded by interval arithmetic.
pub fn compose_shift(f1: &SkipNetwork, domain: &[(f64, f64)]) -> Result<f64> {
    if domain.len() != f1.input_dim() {
        return Err(Error::dim(format!(
            "box has {} coordinates, network has {} inputs",
            domain.len(),
            f1.input_dim()
        )));
    }
    let mut prev: Vec<(f64, f64)> = Vec::new();
    let mut partial = (0.0, 0.0);
    let mut lowest: f64 = 0.0;
    for (l, layer) in f1.layers().iter().enumerate() {
        let acts: Vec<(f64, f64)> = (0..layer.width())
            .map(|r| {
                let (a, b) = interval_dot(layer.input_block().row(r), domain);
                let (c, e) = interval_dot(layer.carry_block().row(r), &prev);
                let bias = layer.bias()[r];
                ((a + c + bias).max(0.0), (b + e + bias).max(0.0))
            })
            .collect();
        let (lo, hi) = interval_dot(f1.output_block(l), &acts);
        partial = (partial.0 + lo, partial.1 + hi);
        lowest = lowest.min(partial.0);
        prev = acts;
    }
    let (lo, _) = interval_dot(f1.output_input_block(), domain);
    lowest = lowest.min(lo + partial.0 + f1.output_bias());
    Ok(1.0 - lowest)
}

/// Plain network equal to `net`, of the same depth and width
/// `N + 2(d + 1)`: next to the hidden neurons every layer carries `x` and
/// the running output sum as ReLU pairs `(v, -v)`.
pub fn skip_to_mlp(net: &SkipNetwork) -> Result<MlpNetwork> {
    let depth = net.layers().len();
    if depth == 0 {
        return Err(Error::arg("a network without hidden layers has no plain form"));
    }
    let n = net.width();
    let net = net.padded_to(n)?;
    let d = net.input_dim();
    let w = n + 2 * (d + 1);
    let (p, q, s) = (n, n + d, n + 2 * d);
    let mut hidden = Vec::with_capacity(depth);
    for (l, layer) in net.layers().iter().enumerate() {
        let cols = if l == 0 { d } else { w };
        let mut m = Matrix::zeros(w, cols);
        let mut bias = vec![0.0; w];
        bias[..n].copy_from_slice(layer.bias());
        if l == 0 {
            for r in 0..n {
                m.row_mut(r).copy_from_slice(layer.input_block().row(r));
            }
            for i in 0..d {
                m.set(p + i, i, 1.0);
                m.set(q + i, i, -1.0);
            }
            for (i, &o) in net.output_input_block().iter().enumerate() {
                m.set(s, i, o);
                m.set(s + 1, i, -o);
            }
        } else {
            for r in 0..n {
                let row = m.row_mut(r);
                row[..n].copy_from_slice(layer.carry_block().row(r));
                for (i, &wx) in layer.input_block().row(r).iter().enumerate() {
                    row[p + i] = wx;
                    row[q + i] = -wx;
                }
            }
            for i in 0..d {
                m.set(p + i, p + i, 1.0);
                m.set(p + i, q + i, -1.0);
                m.set(q + i, p + i, -1.0);
                m.set(q + i, q + i, 1.0);
            }
            let prev_out = net.output_block(l - 1);
            for (c, &o) in prev_out.iter().enumerate() {
                m.set(s, c, o);
                m.set(s + 1, c, -o);
            }
            m.set(s, s, 1.0);
            m.set(s, s + 1, -1.0);
            m.set(s + 1, s, -1.0);
            m.set(s + 1, s + 1, 1.0);
        }
        hidden.push(AffineMap::new(m, bias)?);
    }
    let mut out = vec![0.0; w];
    out[..n].copy_from_slice(net.output_block(depth - 1));
    out[s] = 1.0;
    out[s + 1] = -1.0;
    MlpNetwork::new(d, hidden, AffineMap::from_rows(&[out], w, vec![net.output_bias()])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_x2_hat;
    use crate::net::random_skip_network;

    fn points(d: usize, n: usize) -> Vec<Vec<f64>> {
        crate::pwl::random_points(&vec![(-1.0, 1.0); d], n, 17)
    }

    #[test]
    fn add_sums_values_and_depths() {
        let f = build_x2_hat(2).unwrap();
        let g = build_x2_hat(3).unwrap();
        let h = net_add(&f, &g).unwrap();
        assert_eq!(h.depth(), 5);
        assert_eq!(h.width(), 3);
        for p in points(1, 200) {
            let want = f.eval(&p).unwrap() + g.eval(&p).unwrap();
            assert!((h.eval(&p).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn add_zero_network() {
        let f = random_skip_network(2, 2, &[3, 3]).unwrap();
        let zero = SkipNetwork::affine(&[0.0, 0.0], 0.0).unwrap();
        let h = net_add(&f, &zero).unwrap();
        for p in points(2, 100) {
            assert_eq!(h.eval(&p).unwrap(), f.eval(&p).unwrap());
        }
    }

    #[test]
    fn add_rejects_width_mismatch() {
        let f = random_skip_network(0, 1, &[3]).unwrap();
        let g = random_skip_network(0, 1, &[4]).unwrap();
        assert!(net_add(&f, &g).is_err());
        let h = random_skip_network(0, 2, &[3]).unwrap();
        assert!(net_add(&f, &h).is_err());
    }

    #[test]
    fn compose_projection_onto_x0_reproduces_inner() {
        let f1 = random_skip_network(4, 2, &[3, 3]).unwrap();
        let proj = SkipNetwork::affine(&[1.0, 0.0, 0.0], 0.0).unwrap();
        let shift = compose_shift(&f1, &[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let h = net_compose_modified(&proj, &f1, shift).unwrap();
        assert_eq!(h.depth(), 2);
        for p in points(2, 200) {
            assert!((h.eval(&p).unwrap() - f1.eval(&p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_projection_onto_x() {
        let f1 = random_skip_network(4, 2, &[3]).unwrap();
        let proj = SkipNetwork::affine(&[0.0, 0.0, 1.0], 0.0).unwrap();
        let h = net_compose_modified(&proj, &f1, 1.0).unwrap();
        for p in points(2, 50) {
            assert!((h.eval(&p).unwrap() - p[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_random_pair() {
        let box2 = [(-1.0, 1.0), (-1.0, 1.0)];
        for seed in 0..10 {
            let f1 = random_skip_network(seed, 2, &[3, 3, 3]).unwrap();
            let f2 = random_skip_network(seed + 100, 3, &[4, 4, 4]).unwrap();
            let shift = compose_shift(&f1, &box2).unwrap();
            let h = net_compose_modified(&f2, &f1, shift).unwrap();
            assert_eq!(h.depth(), 6);
            assert!(h.width() <= 5);
            for p in points(2, 200) {
                let inner = f1.eval(&p).unwrap();
                let want = f2.eval(&[inner, p[0], p[1]]).unwrap();
                assert!((h.eval(&p).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compose_rejects_bad_dims() {
        let f1 = random_skip_network(0, 2, &[3]).unwrap();
        let f2 = random_skip_network(0, 2, &[3]).unwrap();
        assert!(net_compose_modified(&f2, &f1, 1.0).is_err());
    }

    #[test]
    fn skip_to_mlp_width_and_values() {
        let net = random_skip_network(7, 2, &[3, 3, 3]).unwrap();
        let plain = skip_to_mlp(&net).unwrap();
        assert_eq!(plain.widths(), vec![9, 9, 9]);
        for p in points(2, 500) {
            assert!((plain.eval(&p).unwrap() - net.eval(&p).unwrap()).abs() < 1e-12);
        }
        let x2 = skip_to_mlp(&build_x2_hat(4).unwrap()).unwrap();
        assert_eq!(x2.width(), 7);
        assert_eq!(x2.depth(), 4);
    }

    #[test]
    fn skip_to_mlp_needs_hidden_layers() {
        assert!(skip_to_mlp(&SkipNetwork::affine(&[1.0], 0.0).unwrap()).is_err());
    }
}
