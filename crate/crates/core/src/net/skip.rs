use super::affine::{relu_in_place, AffineMap, Matrix};
use super::{ReluNet, Trace};
use crate::error::{Error, Result};

/// One hidden layer of a skip network: `relu(W_x x + W_f f_prev + b)`.
///
/// The first layer has an empty carry block.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipLayer {
    input: Matrix,
    carry: Matrix,
    bias: Vec<f64>,
}

impl SkipLayer {
    pub fn new(input: Matrix, carry: Matrix, bias: Vec<f64>) -> Result<Self> {
        if input.rows() != bias.len() || carry.rows() != bias.len() {
            return Err(Error::dim(format!(
                "skip layer blocks have {} / {} rows but bias has {}",
                input.rows(),
                carry.rows(),
                bias.len()
            )));
        }
        if !input.is_finite() || !carry.is_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::arg("skip layer entries must be finite"));
        }
        Ok(SkipLayer { input, carry, bias })
    }

    pub fn width(&self) -> usize {
        self.bias.len()
    }

    pub fn input_block(&self) -> &Matrix {
        &self.input
    }

    pub fn carry_block(&self) -> &Matrix {
        &self.carry
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// A neuron whose pre-activation is a non-positive constant is always 0.
    pub fn is_inert(&self, neuron: usize) -> bool {
        self.bias[neuron] <= 0.0
            && self.input.row(neuron).iter().all(|&w| w == 0.0)
            && self.carry.row(neuron).iter().all(|&w| w == 0.0)
    }

    fn preactivation_into(&self, x: &[f64], prev: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.bias);
        self.input.mul_add_into(x, out);
        self.carry.mul_add_into(prev, out);
    }
}

/// Skip-connected ReLU network:
///
/// ```text
/// f1 = relu(A1 x)
/// fl = relu(Al [x, f(l-1)])       l = 2..L
/// f  = A(L+1) [x, f1, ..., fL]
/// ```
///
/// Every hidden layer re-reads the raw input and the output map reads all
/// hidden layers.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipNetwork {
    input_dim: usize,
    layers: Vec<SkipLayer>,
    output: AffineMap,
}

impl SkipNetwork {
    pub fn new(input_dim: usize, layers: Vec<SkipLayer>, output: AffineMap) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::dim("input dimension must be positive"));
        }
        let mut prev = 0;
        for (l, layer) in layers.iter().enumerate() {
            if layer.width() == 0 {
                return Err(Error::dim(format!("hidden layer {} has no neurons", l + 1)));
            }
            if layer.input.cols() != input_dim {
                return Err(Error::dim(format!(
                    "hidden layer {} input block has {} columns, expected {input_dim}",
                    l + 1,
                    layer.input.cols()
                )));
            }
            if layer.carry.cols() != prev {
                return Err(Error::dim(format!(
                    "hidden layer {} carry block has {} columns, previous layer has {prev} neurons",
                    l + 1,
                    layer.carry.cols()
                )));
            }
            prev = layer.width();
        }
        let total = input_dim + layers.iter().map(SkipLayer::width).sum::<usize>();
        if output.input_dim() != total {
            return Err(Error::dim(format!(
                "output map reads {} inputs, expected input plus all hidden neurons = {total}",
                output.input_dim()
            )));
        }
        if output.output_dim() != 1 {
            return Err(Error::dim(format!(
                "output map must be scalar, has {} rows",
                output.output_dim()
            )));
        }
        Ok(SkipNetwork {
            input_dim,
            layers,
            output,
        })
    }

    /// The network with no hidden layers computing `w . x + b`.
    pub fn affine(weights: &[f64], bias: f64) -> Result<Self> {
        let output = AffineMap::from_rows(&[weights.to_vec()], weights.len(), vec![bias])?;
        SkipNetwork::new(weights.len(), Vec::new(), output)
    }

    pub fn layers(&self) -> &[SkipLayer] {
        &self.layers
    }

    pub fn output(&self) -> &AffineMap {
        &self.output
    }

    pub fn width(&self) -> usize {
        self.layers.iter().map(SkipLayer::width).max().unwrap_or(0)
    }

    /// Column offset of hidden layer `l` (0-based) inside the output map.
    pub fn output_offset(&self, l: usize) -> usize {
        self.input_dim + self.layers[..l].iter().map(SkipLayer::width).sum::<usize>()
    }

    /// Output weights applied to hidden layer `l` (0-based).
    pub fn output_block(&self, l: usize) -> &[f64] {
        let start = self.output_offset(l);
        &self.output.weights().row(0)[start..start + self.layers[l].width()]
    }

    /// Output weights applied to the raw input.
    pub fn output_input_block(&self) -> &[f64] {
        &self.output.weights().row(0)[..self.input_dim]
    }

    pub fn output_bias(&self) -> f64 {
        self.output.bias()[0]
    }

    /// Multiply the output map by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        let out = &mut self.output;
        for v in out.weights_mut().row_mut(0) {
            *v *= factor;
        }
        out.bias_mut()[0] *= factor;
        self
    }

    /// Pad every hidden layer with zero neurons up to `width`.
    pub fn padded_to(&self, width: usize) -> Result<SkipNetwork> {
        if width < self.width() {
            return Err(Error::arg(format!(
                "cannot pad a width-{} network down to {width}",
                self.width()
            )));
        }
        let d = self.input_dim;
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut prev = 0;
        for layer in &self.layers {
            let mut bias = layer.bias.clone();
            bias.resize(width, 0.0);
            layers.push(SkipLayer::new(
                layer.input.padded(width, d),
                layer.carry.padded(width, prev),
                bias,
            )?);
            prev = width;
        }
        let mut row = self.output_input_block().to_vec();
        for l in 0..self.layers.len() {
            row.extend_from_slice(self.output_block(l));
            row.resize(d + (l + 1) * width, 0.0);
        }
        let output = AffineMap::from_rows(&[row], d + self.layers.len() * width, vec![self.output_bias()])?;
        SkipNetwork::new(d, layers, output)
    }

    /// Hidden activations of every layer at `x`.
    pub fn activations(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_input(x)?;
        let mut acts: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut z = vec![0.0; layer.width()];
            let prev = acts.last().map(Vec::as_slice).unwrap_or(&[]);
            layer.preactivation_into(x, prev, &mut z);
            relu_in_place(&mut z);
            acts.push(z);
        }
        Ok(acts)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::dim(format!(
                "network expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(())
    }
}

impl ReluNet for SkipNetwork {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(SkipLayer::width).collect()
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let w = self.output.weights().row(0);
        let mut acc = self.output_bias();
        for (wi, xi) in w.iter().zip(x) {
            acc += wi * xi;
        }
        let mut offset = self.input_dim;
        let mut prev: Vec<f64> = Vec::new();
        let mut cur: Vec<f64> = Vec::new();
        for layer in &self.layers {
            cur.resize(layer.width(), 0.0);
            layer.preactivation_into(x, &prev, &mut cur);
            relu_in_place(&mut cur);
            for (wi, fi) in w[offset..offset + cur.len()].iter().zip(&cur) {
                acc += wi * fi;
            }
            offset += cur.len();
            std::mem::swap(&mut prev, &mut cur);
        }
        Ok(acc)
    }

    fn trace(&self, x: &[f64]) -> Result<Trace> {
        self.check_input(x)?;
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut prev: Vec<f64> = Vec::new();
        let mut all = x.to_vec();
        for layer in &self.layers {
            let mut z = vec![0.0; layer.width()];
            layer.preactivation_into(x, &prev, &mut z);
            let mut f = z.clone();
            relu_in_place(&mut f);
            all.extend_from_slice(&f);
            pre.push(z);
            prev = f;
        }
        let output = self.output.apply(&all)[0];
        Ok(Trace {
            preactivations: pre,
            output,
        })
    }

    fn directional(&self, x: &[f64], dir: &[f64]) -> Result<(f64, f64)> {
        self.check_input(x)?;
        self.check_input(dir)?;
        let mut all_v = x.to_vec();
        let mut all_t = dir.to_vec();
        let mut prev_v: Vec<f64> = Vec::new();
        let mut prev_t: Vec<f64> = Vec::new();
        for layer in &self.layers {
            let n = layer.width();
            let mut z = vec![0.0; n];
            layer.preactivation_into(x, &prev_v, &mut z);
            let mut dz = vec![0.0; n];
            layer.input.mul_add_into(dir, &mut dz);
            layer.carry.mul_add_into(&prev_t, &mut dz);
            super::one_sided_relu(&mut z, &mut dz);
            all_v.extend_from_slice(&z);
            all_t.extend_from_slice(&dz);
            prev_v = z;
            prev_t = dz;
        }
        let v = self.output.apply(&all_v)[0];
        let mut dv = [0.0];
        self.output.weights().mul_add_into(&all_t, &mut dv);
        Ok((v, dv[0]))
    }
}
