use std::fmt;

use super::network::{signed_limit, LayerSpec, NetworkSpec};
use crate::rns::ModuliSet;

/// Worst-case accumulator magnitude of one weighted layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerBound {
    pub layer: usize,
    pub kind: &'static str,
    pub bound: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundViolation {
    /// `None` when the input activation range alone already exceeds the limit.
    pub layer: Option<usize>,
    pub kind: &'static str,
    pub bound: u128,
    pub limit: u64,
}

impl fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.layer {
            Some(i) => write!(f, "overflow bound violated at layer {i} ({})", self.kind)?,
            None => write!(f, "overflow bound violated at the input")?,
        }
        write!(
            f,
            ": worst-case magnitude {} exceeds (M-1)/2 = {}",
            self.bound, self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub limit: u64,
    pub input_bound: u64,
    pub layers: Vec<LayerBound>,
    pub violation: Option<BoundViolation>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    pub fn max_bound(&self) -> u128 {
        self.layers.iter().map(|l| l.bound).max().unwrap_or(0)
    }
}

/// Propagates the worst-case activation magnitude through the network.
///
/// Each weighted layer's bound is `max_j (sum_i |w_ji| * a + |b_j|)` where
/// `a` is the incoming bound; ReLU and max-pool pass it through. Shape-only
/// layers assume every weight at the declared bit-width limit.
pub fn check_overflow_bound(net: &NetworkSpec, ms: &ModuliSet) -> BoundReport {
    let limit = ms.pos_max();
    let input_bound = signed_limit(net.activation_bits);
    let mut report = BoundReport {
        limit,
        input_bound,
        layers: vec![],
        violation: None,
    };
    if u128::from(input_bound) > u128::from(limit) {
        report.violation = Some(BoundViolation {
            layer: None,
            kind: "input",
            bound: input_bound.into(),
            limit,
        });
        return report;
    }
    let mut activation = u128::from(input_bound);
    for (i, layer) in net.layers.iter().enumerate() {
        let Some((weights, bias, fan_in)) = layer.weighted() else {
            continue;
        };
        let outputs = match layer {
            LayerSpec::Conv2d(c) => c.out_channels,
            LayerSpec::FullyConnected(f) => f.out_features,
            _ => unreachable!(),
        };
        let bound = (0..outputs)
            .map(|j| {
                let weight_sum: u128 = match weights {
                    Some(w) => w[j * fan_in..(j + 1) * fan_in]
                        .iter()
                        .map(|v| u128::from(v.unsigned_abs()))
                        .sum(),
                    None => fan_in as u128 * u128::from(signed_limit(net.weight_bits)),
                };
                let b = bias.map_or(0, |b| u128::from(b[j].unsigned_abs()));
                weight_sum.saturating_mul(activation).saturating_add(b)
            })
            .max()
            .unwrap_or(0);
        report.layers.push(LayerBound {
            layer: i,
            kind: layer.kind(),
            bound,
        });
        if bound > u128::from(limit) {
            report.violation = Some(BoundViolation {
                layer: Some(i),
                kind: layer.kind(),
                bound,
                limit,
            });
            return report;
        }
        activation = bound;
    }
    report
}
