//! Mutable neuron-level form of a skip network used while splicing networks
//! together.

use crate::error::Result;
use crate::net::{AffineMap, Matrix, SkipLayer, SkipNetwork};

/// `relu(wx . x + wc . prev + b)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Neuron {
    pub wx: Vec<f64>,
    pub wc: Vec<f64>,
    pub b: f64,
}

impl Neuron {
    fn is_inert(&self) -> bool {
        self.b <= 0.0 && self.wx.iter().chain(&self.wc).all(|&w| w == 0.0)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Draft {
    pub d: usize,
    pub layers: Vec<Vec<Neuron>>,
    pub out_x: Vec<f64>,
    pub out_layers: Vec<Vec<f64>>,
    pub out_b: f64,
}

impl Draft {
    pub fn from_net(net: &SkipNetwork) -> Draft {
        let d = net.output_input_block().len();
        let layers = net
            .layers()
            .iter()
            .map(|layer| {
                (0..layer.width())
                    .map(|r| Neuron {
                        wx: layer.input_block().row(r).to_vec(),
                        wc: layer.carry_block().row(r).to_vec(),
                        b: layer.bias()[r],
                    })
                    .collect()
            })
            .collect();
        Draft {
            d,
            layers,
            out_x: net.output_input_block().to_vec(),
            out_layers: (0..net.layers().len())
                .map(|l| net.output_block(l).to_vec())
                .collect(),
            out_b: net.output_bias(),
        }
    }

    /// Remove neurons that are identically zero, together with every read
    /// of them. Removal cascades to neurons that only read removed ones.
    pub fn drop_inert(mut self) -> Draft {
        let mut keep_prev: Option<Vec<bool>> = None;
        for (l, layer) in self.layers.iter_mut().enumerate() {
            if let Some(keep) = &keep_prev {
                for n in layer.iter_mut() {
                    n.wc = n.wc.iter().zip(keep).filter(|(_, &k)| k).map(|(&w, _)| w).collect();
                }
            }
            let keep: Vec<bool> = layer.iter().map(|n| !n.is_inert()).collect();
            let mut idx = 0;
            layer.retain(|_| {
                idx += 1;
                keep[idx - 1]
            });
            let out = &mut self.out_layers[l];
            *out = out.iter().zip(&keep).filter(|(_, &k)| k).map(|(&w, _)| w).collect();
            keep_prev = Some(keep);
        }
        self
    }

    pub fn width(&self) -> usize {
        self.layers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Assemble, padding every layer with zero neurons to the common width
    /// `max(width, min_width)`.
    pub fn finish(self, min_width: usize) -> Result<SkipNetwork> {
        let d = self.d;
        let w = self.width().max(min_width).max(1);
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut prev = 0;
        for neurons in &self.layers {
            let mut input = Matrix::zeros(w, d);
            let mut carry = Matrix::zeros(w, prev);
            let mut bias = vec![0.0; w];
            for (r, n) in neurons.iter().enumerate() {
                input.row_mut(r).copy_from_slice(&n.wx);
                carry.row_mut(r)[..n.wc.len()].copy_from_slice(&n.wc);
                bias[r] = n.b;
            }
            layers.push(SkipLayer::new(input, carry, bias)?);
            prev = w;
        }
        let mut row = self.out_x.clone();
        for block in &self.out_layers {
            let start = row.len();
            row.extend_from_slice(block);
            row.resize(start + w, 0.0);
        }
        let cols = row.len();
        SkipNetwork::new(d, layers, AffineMap::from_rows(&[row], cols, vec![self.out_b])?)
    }
}
