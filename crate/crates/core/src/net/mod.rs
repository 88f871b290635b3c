//! Plain and skip-connected ReLU networks, their evaluators and the JSON
//! network document.

mod affine;
mod doc;
mod mlp;
mod random;
mod skip;

pub use affine::{AffineMap, Matrix};
pub use doc::{from_document, to_document, NetworkKind};
pub use mlp::MlpNetwork;
pub use random::random_skip_network;
pub use skip::{SkipLayer, SkipNetwork};

use crate::error::Result;
use crate::parallel::{map_slice, Execution};

/// Pre-activations of every hidden layer together with the network output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub preactivations: Vec<Vec<f64>>,
    pub output: f64,
}

/// Shared interface of scalar ReLU networks.
pub trait ReluNet: Sync {
    fn input_dim(&self) -> usize;

    /// Hidden layer widths `n_1, ..., n_L`.
    fn widths(&self) -> Vec<usize>;

    fn depth(&self) -> usize {
        self.widths().len()
    }

    fn eval(&self, x: &[f64]) -> Result<f64>;

    fn trace(&self, x: &[f64]) -> Result<Trace>;

    /// Value at `x` and the one-sided derivative along `dir`. A neuron sitting
    /// exactly at its kink counts as active when the direction moves its
    /// pre-activation upwards.
    fn directional(&self, x: &[f64], dir: &[f64]) -> Result<(f64, f64)>;
}

/// Either kind of network, as stored in a network document.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Mlp(MlpNetwork),
    Skip(SkipNetwork),
}

impl Network {
    pub fn kind(&self) -> NetworkKind {
        match self {
            Network::Mlp(_) => NetworkKind::Mlp,
            Network::Skip(_) => NetworkKind::Skip,
        }
    }

    pub fn as_dyn(&self) -> &dyn ReluNet {
        match self {
            Network::Mlp(n) => n,
            Network::Skip(n) => n,
        }
    }
}

impl From<MlpNetwork> for Network {
    fn from(n: MlpNetwork) -> Self {
        Network::Mlp(n)
    }
}

impl From<SkipNetwork> for Network {
    fn from(n: SkipNetwork) -> Self {
        Network::Skip(n)
    }
}

impl ReluNet for Network {
    fn input_dim(&self) -> usize {
        self.as_dyn().input_dim()
    }
    fn widths(&self) -> Vec<usize> {
        self.as_dyn().widths()
    }
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.as_dyn().eval(x)
    }
    fn trace(&self, x: &[f64]) -> Result<Trace> {
        self.as_dyn().trace(x)
    }
    fn directional(&self, x: &[f64], dir: &[f64]) -> Result<(f64, f64)> {
        self.as_dyn().directional(x, dir)
    }
}

/// Evaluate `net` at every point, keeping input order.
pub fn eval_batch<N: ReluNet + ?Sized>(
    net: &N,
    points: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<f64>> {
    map_slice(points, exec, |p| net.eval(p)).into_iter().collect()
}

const KINK_TOL: f64 = 1e-12;

/// ReLU applied to values and tangents, breaking ties at the kink by the
/// sign of the tangent.
pub(crate) fn one_sided_relu(z: &mut [f64], dz: &mut [f64]) {
    for (v, t) in z.iter_mut().zip(dz.iter_mut()) {
        let active = if v.abs() <= KINK_TOL * (1.0 + t.abs()) {
            *t > 0.0
        } else {
            *v > 0.0
        };
        *v = v.max(0.0);
        if !active {
            *t = 0.0;
        }
    }
}
