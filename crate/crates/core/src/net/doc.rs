//! JSON network document.
//!
//! ```text
//! { "kind": "mlp" | "skip", "input_dim": d,
//!   "layers": [ { "weights": [[..]], "bias": [..] }, .. ],
//!   "output": { "weights": [[..]], "bias": [..] } }
//! ```
//!
//! Skip layers store `[W_x | W_f]` row-wise and carry `"input_block_cols": d`.
//! Floats are written with the shortest representation that round-trips, so a
//! save/load cycle reproduces every weight bit for bit.

use serde::{Deserialize, Serialize};

use super::affine::{AffineMap, Matrix};
use super::mlp::MlpNetwork;
use super::skip::{SkipLayer, SkipNetwork};
use super::Network;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Mlp,
    Skip,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_block_cols: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    kind: NetworkKind,
    input_dim: usize,
    layers: Vec<LayerDoc>,
    output: LayerDoc,
}

fn map_doc(map: &AffineMap) -> LayerDoc {
    LayerDoc {
        weights: map.weights().to_rows(),
        bias: map.bias().to_vec(),
        input_block_cols: None,
    }
}

/// Serialize a network to its JSON document.
pub fn to_document(net: &Network) -> String {
    let doc = match net {
        Network::Mlp(n) => NetworkDoc {
            kind: NetworkKind::Mlp,
            input_dim: super::ReluNet::input_dim(n),
            layers: n.hidden().iter().map(map_doc).collect(),
            output: map_doc(n.output()),
        },
        Network::Skip(n) => {
            let d = super::ReluNet::input_dim(n);
            let layers = n
                .layers()
                .iter()
                .map(|layer| LayerDoc {
                    weights: (0..layer.width())
                        .map(|r| {
                            let mut row = layer.input_block().row(r).to_vec();
                            row.extend_from_slice(layer.carry_block().row(r));
                            row
                        })
                        .collect(),
                    bias: layer.bias().to_vec(),
                    input_block_cols: Some(d),
                })
                .collect();
            NetworkDoc {
                kind: NetworkKind::Skip,
                input_dim: d,
                layers,
                output: map_doc(n.output()),
            }
        }
    };
    serde_json::to_string(&doc).expect("network documents always serialize")
}

fn matrix_at(rows: &[Vec<f64>], cols: usize, pos: &str) -> Result<Matrix> {
    Matrix::from_rows(rows, cols).map_err(|e| Error::parse(pos, e.to_string()))
}

fn row_width(rows: &[Vec<f64>], pos: &str) -> Result<usize> {
    rows.first()
        .map(Vec::len)
        .ok_or_else(|| Error::parse(pos, "weight matrix has no rows"))
}

/// Parse and validate a network document.
pub fn from_document(text: &str) -> Result<Network> {
    let doc: NetworkDoc = serde_json::from_str(text)?;
    let d = doc.input_dim;
    let wrap = |pos: &str, e: Error| match e {
        Error::Parse { .. } => e,
        other => Error::parse(pos, other.to_string()),
    };
    match doc.kind {
        NetworkKind::Mlp => {
            let mut hidden = Vec::with_capacity(doc.layers.len());
            let mut prev = d;
            for (l, layer) in doc.layers.iter().enumerate() {
                let pos = format!("layers[{l}]");
                let m = matrix_at(&layer.weights, prev, &pos)?;
                let map = AffineMap::new(m, layer.bias.clone()).map_err(|e| wrap(&pos, e))?;
                prev = map.output_dim();
                hidden.push(map);
            }
            let m = matrix_at(&doc.output.weights, prev, "output")?;
            let output = AffineMap::new(m, doc.output.bias.clone()).map_err(|e| wrap("output", e))?;
            MlpNetwork::new(d, hidden, output)
                .map(Network::Mlp)
                .map_err(|e| wrap("network", e))
        }
        NetworkKind::Skip => {
            let mut layers = Vec::with_capacity(doc.layers.len());
            let mut prev = 0;
            let mut total = d;
            for (l, layer) in doc.layers.iter().enumerate() {
                let pos = format!("layers[{l}]");
                if layer.input_block_cols != Some(d) {
                    return Err(Error::parse(
                        &pos,
                        format!("skip layer must declare input_block_cols = {d}"),
                    ));
                }
                let full = matrix_at(&layer.weights, d + prev, &pos)?;
                let n = full.rows();
                let mut input = Matrix::zeros(n, d);
                let mut carry = Matrix::zeros(n, prev);
                for r in 0..n {
                    input.row_mut(r).copy_from_slice(&full.row(r)[..d]);
                    carry.row_mut(r).copy_from_slice(&full.row(r)[d..]);
                }
                layers.push(
                    SkipLayer::new(input, carry, layer.bias.clone()).map_err(|e| wrap(&pos, e))?,
                );
                prev = n;
                total += n;
            }
            let cols = row_width(&doc.output.weights, "output")?;
            if cols != total {
                return Err(Error::parse(
                    "output",
                    format!("output map has {cols} columns, expected {total}"),
                ));
            }
            let m = matrix_at(&doc.output.weights, total, "output")?;
            let output = AffineMap::new(m, doc.output.bias.clone()).map_err(|e| wrap("output", e))?;
            SkipNetwork::new(d, layers, output)
                .map(Network::Skip)
                .map_err(|e| wrap("network", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::random_skip_network;

    #[test]
    fn skip_document_round_trips() {
        let net: Network = random_skip_network(3, 2, &[3, 4]).unwrap().into();
        let text = to_document(&net);
        assert!(text.contains("\"kind\":\"skip\""));
        assert!(text.contains("\"input_block_cols\":2"));
        assert_eq!(from_document(&text).unwrap(), net);
    }

    #[test]
    fn mismatched_layer_dims_rejected() {
        let text = r#"{"kind":"mlp","input_dim":1,
            "layers":[{"weights":[[1.0],[1.0]],"bias":[0.0,0.0]}],
            "output":{"weights":[[1.0,1.0,1.0]],"bias":[0.0]}}"#;
        let err = from_document(text).unwrap_err();
        assert!(matches!(err, Error::Parse { ref position, .. } if position.contains("output")));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = from_document("{\"kind\": \"mlp\",\n \"input_dim\": }").unwrap_err();
        match err {
            Error::Parse { position, .. } => assert!(position.starts_with("line 2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_rejected() {
        let text = r#"{"kind":"conv","input_dim":1,"layers":[],"output":{"weights":[[1.0]],"bias":[0.0]}}"#;
        assert!(from_document(text).is_err());
    }
}
