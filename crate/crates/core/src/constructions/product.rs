//! Products, monomials and polynomials.

use serde::{Deserialize, Serialize};

use super::algebra::{net_add, net_compose_modified};
use super::sawtooth::s_hat_block;
use crate::error::{Error, Result};
use crate::net::SkipNetwork;
use crate::parallel::{map_slice, Execution};

/// Width of every monomial network.
pub const MONOMIAL_WIDTH: usize = 4;

/// Carry shift used when nesting products on `[-1, 1]^d`. Inner products and
/// all partial output sums stay above `-4` there.
const PRODUCT_SHIFT: f64 = 8.0;

/// `M^2 (2 ŝ_L((u + v) / 2M) - 2 ŝ_L(v / 2M) - 2 ŝ_L(u / 2M))` where `u`, `v`
/// are the linear forms with coefficient vectors `u`, `v`. The three blocks
/// are stacked in that order.
fn product_net(levels: usize, bound: f64, u: &[f64], v: &[f64], compact: bool) -> Result<SkipNetwork> {
    let s = 0.5 / bound;
    let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| s * (a + b)).collect();
    let vs: Vec<f64> = v.iter().map(|b| s * b).collect();
    let us: Vec<f64> = u.iter().map(|a| s * a).collect();
    let k = 2.0 * bound * bound;
    let a = s_hat_block(levels, &sum, compact)?.scaled(k);
    let b = s_hat_block(levels, &vs, compact)?.scaled(-k);
    let c = s_hat_block(levels, &us, compact)?.scaled(-k);
    net_add(&net_add(&a, &b)?, &c)
}

fn unit(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// The product network `m_L(x, y)` on `[-M, M]^2`: depth `3L`, width 3.
/// It equals `M^2 Π_(L-2) m(x/M, y/M)` there, so its error against `xy` is
/// `M^2 2^(-2(L-1))`.
pub fn build_xy_hat(levels: usize, bound: f64) -> Result<SkipNetwork> {
    if levels < 2 {
        return Err(Error::arg("m_L needs L >= 2"));
    }
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::arg(format!("bound M must be positive and finite, got {bound}")));
    }
    product_net(levels, bound, &[0.0, 1.0], &[1.0, 0.0], false)
}

/// Exponent vector `k` of `x^k = x_1^k_1 ... x_d^k_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::arg("monomial needs at least one variable"));
        }
        if exponents.iter().all(|&k| k == 0) {
            return Err(Error::arg("monomial degree must be at least 1"));
        }
        Ok(Monomial { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// `|k|`.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        monomial_value(&self.exponents, x)
    }

    /// Coordinate of each factor, ascending, with multiplicity.
    pub fn factors(&self) -> Vec<usize> {
        self.exponents
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect()
    }

    /// `(p - 1) 2^(-2(L-1))`.
    pub fn error_bound(&self, levels: usize) -> f64 {
        (self.degree() as f64 - 1.0).max(0.0) * (-2.0 * (levels as f64 - 1.0)).exp2()
    }
}

fn monomial_value(exponents: &[u32], x: &[f64]) -> f64 {
    exponents
        .iter()
        .zip(x)
        .map(|(&k, &xi)| xi.powi(k as i32))
        .product()
}

/// Network `M̂_k` approximating `x^k` on `[-1, 1]^d`, built as
/// `m_L(x_i, M̂_k'(x))` with `i` the lowest coordinate still present in `k`.
///
/// For degree `p >= 2` the depth is `3(p-1)L` and the width 4; the error is
/// at most `(p-1) 2^(-2(L-1))` and `|M̂_k| <= 1`. Degree 1 gives the
/// coordinate itself with no hidden layers.
pub fn build_monomial(k: &Monomial, levels: usize) -> Result<SkipNetwork> {
    if levels < 2 {
        return Err(Error::arg("monomial networks need L >= 2"));
    }
    let d = k.dim();
    let factors = k.factors();
    let p = factors.len();
    if p == 1 {
        return SkipNetwork::affine(&unit(d, factors[0]), 0.0);
    }
    let (a, b) = (factors[p - 2], factors[p - 1]);
    let mut net = product_net(levels, 1.0, &unit(d, b), &unit(d, a), false)?;
    for &i in factors[..p - 2].iter().rev() {
        // outer block reads [x0, x]: u = x_i, v = x0
        let outer = product_net(levels, 1.0, &unit(d + 1, i + 1), &unit(d + 1, 0), true)?;
        net = net_compose_modified(&outer, &net, PRODUCT_SHIFT)?;
    }
    net.padded_to(MONOMIAL_WIDTH)
}

/// `Σ a_k x^k` with exponent vectors of a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    exponents: Vec<u32>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialDoc {
    dim: usize,
    terms: Vec<TermDoc>,
}

impl Polynomial {
    /// Repeated exponent vectors are merged and zero coefficients dropped;
    /// the remaining terms keep their first-appearance order.
    pub fn new(dim: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("polynomial dimension must be positive"));
        }
        let mut merged: Vec<(Vec<u32>, f64)> = Vec::with_capacity(terms.len());
        for (t, (k, a)) in terms.into_iter().enumerate() {
            if k.len() != dim {
                return Err(Error::dim(format!(
                    "term {t} has {} exponents, polynomial has dimension {dim}",
                    k.len()
                )));
            }
            if !a.is_finite() {
                return Err(Error::arg(format!("term {t} has a non-finite coefficient")));
            }
            match merged.iter_mut().find(|(m, _)| *m == k) {
                Some((_, c)) => *c += a,
                None => merged.push((k, a)),
            }
        }
        merged.retain(|(_, a)| *a != 0.0);
        Ok(Polynomial { dim, terms: merged })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(k, _)| k.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// `Σ |a_k|`.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.abs()).sum()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, a)| a * monomial_value(k, x))
            .sum()
    }

    /// `(p - 1) 2^(-2(L-1)) Σ |a_k|`.
    pub fn error_bound(&self, levels: usize) -> f64 {
        let p = self.degree() as f64;
        (p - 1.0).max(0.0) * (-2.0 * (levels as f64 - 1.0)).exp2() * self.coeff_l1()
    }

    /// `3 C(p+d, d) (p-1) L`, the depth allowance for degree `p`.
    pub fn depth_bound(&self, levels: usize) -> usize {
        let p = self.degree() as usize;
        3 * binomial(p + self.dim, self.dim) * p.saturating_sub(1) * levels
    }

    /// Parse `{ "dim": d, "terms": [ { "exponents": [..], "coeff": a } ] }`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolynomialDoc = serde_json::from_str(text)?;
        Self::new(
            doc.dim,
            doc.terms.into_iter().map(|t| (t.exponents, t.coeff)).collect(),
        )
        .map_err(|e| Error::parse("terms", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let doc = PolynomialDoc {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, a)| TermDoc { exponents: k.clone(), coeff: *a })
                .collect(),
        };
        serde_json::to_string(&doc).expect("polynomial documents always serialize")
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Network for `P` on `[-1, 1]^d`: the sum of the scaled monomial networks
/// of every term of degree >= 2, with the constant and linear terms placed
/// in the output map. Width 4 (none when `P` is affine).
pub fn build_polynomial(poly: &Polynomial, levels: usize) -> Result<SkipNetwork> {
    build_polynomial_with(poly, levels, Execution::default())
}

/// [`build_polynomial`] with an explicit execution mode for the per-term
/// networks. Terms are summed in input order either way.
pub fn build_polynomial_with(poly: &Polynomial, levels: usize, exec: Execution) -> Result<SkipNetwork> {
    if poly.terms.is_empty() {
        return Err(Error::arg("polynomial has no terms"));
    }
    let d = poly.dim;
    let mut linear = vec![0.0; d];
    let mut constant = 0.0;
    let mut high = Vec::new();
    for (k, a) in &poly.terms {
        match k.iter().sum::<u32>() {
            0 => constant += a,
            1 => linear[k.iter().position(|&e| e == 1).unwrap()] += a,
            _ => high.push((k.clone(), *a)),
        }
    }
    let nets: Vec<SkipNetwork> = map_slice(&high, exec, |(k, a)| {
        let m = Monomial::new(k.clone())?;
        Ok(build_monomial(&m, levels)?.scaled(*a))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut total = SkipNetwork::affine(&linear, constant)?;
    for net in &nets {
        total = net_add(&total, net)?;
    }
    Ok(total)
}
