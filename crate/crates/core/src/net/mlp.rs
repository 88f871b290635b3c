use super::affine::{relu_in_place, AffineMap, Matrix};
use super::skip::{SkipLayer, SkipNetwork};
use super::{ReluNet, Trace};
use crate::error::{Error, Result};

/// Plain ReLU network `theta_{L+1} o relu o theta_L o ... o relu o theta_1`
/// with a scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpNetwork {
    input_dim: usize,
    hidden: Vec<AffineMap>,
    output: AffineMap,
}

impl MlpNetwork {
    pub fn new(input_dim: usize, hidden: Vec<AffineMap>, output: AffineMap) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::dim("input dimension must be positive"));
        }
        let mut prev = input_dim;
        for (l, layer) in hidden.iter().enumerate() {
            if layer.input_dim() != prev {
                return Err(Error::dim(format!(
                    "hidden layer {} reads {} inputs, previous layer provides {prev}",
                    l + 1,
                    layer.input_dim()
                )));
            }
            if layer.output_dim() == 0 {
                return Err(Error::dim(format!("hidden layer {} has no neurons", l + 1)));
            }
            prev = layer.output_dim();
        }
        if output.input_dim() != prev {
            return Err(Error::dim(format!(
                "output map reads {} inputs, last layer provides {prev}",
                output.input_dim()
            )));
        }
        if output.output_dim() != 1 {
            return Err(Error::dim(format!(
                "output map must be scalar, has {} rows",
                output.output_dim()
            )));
        }
        Ok(MlpNetwork {
            input_dim,
            hidden,
            output,
        })
    }

    pub fn hidden(&self) -> &[AffineMap] {
        &self.hidden
    }

    pub fn output(&self) -> &AffineMap {
        &self.output
    }

    pub fn width(&self) -> usize {
        self.hidden.iter().map(AffineMap::output_dim).max().unwrap_or(0)
    }

    /// Same function viewed as a skip network whose shortcuts all carry zero
    /// weight.
    pub fn to_skip(&self) -> SkipNetwork {
        let d = self.input_dim;
        let mut layers = Vec::with_capacity(self.hidden.len());
        for (l, map) in self.hidden.iter().enumerate() {
            let n = map.output_dim();
            let layer = if l == 0 {
                SkipLayer::new(map.weights().clone(), Matrix::zeros(n, 0), map.bias().to_vec())
            } else {
                SkipLayer::new(Matrix::zeros(n, d), map.weights().clone(), map.bias().to_vec())
            };
            layers.push(layer.expect("blocks of a valid plain network chain"));
        }
        let total: usize = d + self.hidden.iter().map(AffineMap::output_dim).sum::<usize>();
        let mut out = Matrix::zeros(1, total);
        let last = self.output.weights().row(0);
        let offset = total - last.len();
        out.row_mut(0)[offset..].copy_from_slice(last);
        let output = AffineMap::new(out, self.output.bias().to_vec()).expect("finite");
        SkipNetwork::new(d, layers, output).expect("embedding preserves shapes")
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

impl ReluNet for MlpNetwork {
    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn widths(&self) -> Vec<usize> {
        self.hidden.iter().map(AffineMap::output_dim).collect()
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.hidden {
            next.resize(layer.output_dim(), 0.0);
            layer.apply_into(&cur, &mut next);
            relu_in_place(&mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        let mut out = [0.0];
        self.output.apply_into(&cur, &mut out);
        Ok(out[0])
    }

    fn trace(&self, x: &[f64]) -> Result<Trace> {
        self.check_input(x)?;
        let mut pre = Vec::with_capacity(self.hidden.len());
        let mut cur = x.to_vec();
        for layer in &self.hidden {
            let z = layer.apply(&cur);
            cur = z.clone();
            relu_in_place(&mut cur);
            pre.push(z);
        }
        let output = self.output.apply(&cur)[0];
        Ok(Trace {
            preactivations: pre,
            output,
        })
    }

    fn directional(&self, x: &[f64], dir: &[f64]) -> Result<(f64, f64)> {
        self.check_input(x)?;
        self.check_input(dir)?;
        let mut val = x.to_vec();
        let mut tan = dir.to_vec();
        for layer in &self.hidden {
            let mut z = layer.apply(&val);
            let mut dz = vec![0.0; layer.output_dim()];
            layer.weights().mul_add_into(&tan, &mut dz);
            super::one_sided_relu(&mut z, &mut dz);
            val = z;
            tan = dz;
        }
        let v = self.output.apply(&val)[0];
        let mut dv = [0.0];
        self.output.weights().mul_add_into(&tan, &mut dv);
        Ok((v, dv[0]))
    }
}
