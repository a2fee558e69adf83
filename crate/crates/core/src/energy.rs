//! Energy accounting from block-level synthesis data.
//!
//! Every block is charged one operation per clock cycle, so the energy per
//! operation is `E = P / f` (mW / MHz = nJ, reported in pJ). Memory traffic is
//! not modeled.
//!
//! Per weighted layer with `macs` MACs followed by `relus` ReLUs:
//!
//! ```text
//! E_rns  = relus * E(ReLU-RNS) + macs * (E(MultiplierRNS) + E(AdderRNS))
//! E_conv = relus * E(ReLU32)   + macs * (E(Multiplier32)  + E(Adder32))
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::inference::{layer_macs, LayerSpec, NetworkSpec};

pub const ADDER32: &str = "Adder32";
pub const ADDER_RNS: &str = "AdderRNS";
pub const MULTIPLIER32: &str = "Multiplier32";
pub const MULTIPLIER_RNS: &str = "MultiplierRNS";
pub const CONVERT_TO_RNS: &str = "ConvertToRNS";
pub const RELU_RNS: &str = "ReLU-RNS";
pub const COMPARE_RNS: &str = "CompareRNS";
pub const RELU32: &str = "ReLU32";

pub const BLOCKS: [&str; 8] = [
    ADDER32,
    ADDER_RNS,
    MULTIPLIER32,
    MULTIPLIER_RNS,
    CONVERT_TO_RNS,
    RELU_RNS,
    COMPARE_RNS,
    RELU32,
];

/// Printed with every report.
pub const MEMORY_CAVEAT: &str = "memory-access energy is not modeled";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("energy table: {0}")]
    Config(String),
    #[error("degenerate model: RNS and conventional MAC energies are equal, no break-even point")]
    Degenerate,
    #[error("{0}")]
    Network(String),
}

/// Picojoules per operation for a block running one operation per cycle.
pub fn energy_per_op(power_mw: f64, freq_mhz: f64) -> Result<f64, EnergyError> {
    if !(power_mw > 0.0 && power_mw.is_finite()) || !(freq_mhz > 0.0 && freq_mhz.is_finite()) {
        return Err(EnergyError::InvalidArgument(format!(
            "power {power_mw} mW and frequency {freq_mhz} MHz must be positive"
        )));
    }
    Ok(power_mw / freq_mhz * 1000.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub power_mw: f64,
    pub freq_mhz: f64,
}

/// Power/frequency per named block.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    blocks: BTreeMap<String, BlockSpec>,
}

impl Default for EnergyTable {
    /// 65nm synthesis results; `ReLU32` is a sign-bit multiplexer and is
    /// charged nothing.
    fn default() -> Self {
        let rows = [
            (ADDER32, 1.05, 625.0),
            (ADDER_RNS, 1.18, 625.0),
            (MULTIPLIER32, 3.04, 250.0),
            (MULTIPLIER_RNS, 1.56, 250.0),
            (CONVERT_TO_RNS, 2.6, 250.0),
            (RELU_RNS, 0.88, 156.0),
            (COMPARE_RNS, 1.67, 156.0),
            (RELU32, 0.0, 625.0),
        ];
        EnergyTable {
            blocks: rows
                .into_iter()
                .map(|(name, power_mw, freq_mhz)| (name.to_string(), BlockSpec { power_mw, freq_mhz }))
                .collect(),
        }
    }
}

impl EnergyTable {
    pub fn empty() -> Self {
        EnergyTable {
            blocks: BTreeMap::new(),
        }
    }

    /// Overrides one block. Zero power is accepted (an idealized free block);
    /// frequency must be positive.
    pub fn set(&mut self, name: &str, spec: BlockSpec) -> Result<(), EnergyError> {
        let valid =
            spec.freq_mhz.is_finite() && spec.freq_mhz > 0.0 && spec.power_mw.is_finite() && spec.power_mw >= 0.0;
        if !valid {
            return Err(EnergyError::Config(format!(
                "block {name}: power {} mW must be >= 0 and frequency {} MHz > 0",
                spec.power_mw, spec.freq_mhz
            )));
        }
        self.blocks.insert(name.to_string(), spec);
        Ok(())
    }

    pub fn remove(&mut self, name: &str) -> Option<BlockSpec> {
        self.blocks.remove(name)
    }

    pub fn block(&self, name: &str) -> Option<&BlockSpec> {
        self.blocks.get(name)
    }

    /// Picojoules per operation of `name`.
    pub fn energy(&self, name: &str) -> Result<f64, EnergyError> {
        let b = self
            .blocks
            .get(name)
            .ok_or_else(|| EnergyError::Config(format!("missing block {name}")))?;
        if b.power_mw == 0.0 {
            return Ok(0.0);
        }
        energy_per_op(b.power_mw, b.freq_mhz)
    }

    /// Table file: `{ "<block>": {"power_mw": .., "freq_mhz": ..}, ... }`.
    /// Blocks not listed keep their built-in values; unknown names are rejected.
    pub fn from_json(text: &str) -> Result<Self, EnergyError> {
        let overrides: BTreeMap<String, BlockSpec> =
            serde_json::from_str(text).map_err(|e| EnergyError::Config(format!("parse error: {e}")))?;
        let mut table = EnergyTable::default();
        for (name, spec) in overrides {
            if !BLOCKS.contains(&name.as_str()) {
                return Err(EnergyError::Config(format!(
                    "unknown block {name:?}; expected one of {BLOCKS:?}"
                )));
            }
            table.set(&name, spec)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.blocks).expect("table serializes")
    }

    /// `E(MultiplierRNS) + E(AdderRNS)`
    pub fn rns_mac(&self) -> Result<f64, EnergyError> {
        Ok(self.energy(MULTIPLIER_RNS)? + self.energy(ADDER_RNS)?)
    }

    /// `E(Multiplier32) + E(Adder32)`
    pub fn conventional_mac(&self) -> Result<f64, EnergyError> {
        Ok(self.energy(MULTIPLIER32)? + self.energy(ADDER32)?)
    }
}

/// Operation counts and energies of one layer (or composite).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerCost {
    pub kind: String,
    pub mac_count: u64,
    pub relu_count: u64,
    /// Full RNS comparisons (max-pool windows, argmax tree).
    pub compare_count: u64,
    pub energy_rns: f64,
    pub energy_conventional: f64,
}

/// Cost of `macs` MACs and `relus` ReLUs.
pub fn op_cost(macs: u64, relus: u64, table: &EnergyTable) -> Result<LayerCost, EnergyError> {
    Ok(LayerCost {
        kind: "ops".into(),
        mac_count: macs,
        relu_count: relus,
        compare_count: 0,
        energy_rns: relus as f64 * table.energy(RELU_RNS)? + macs as f64 * table.rns_mac()?,
        energy_conventional: relus as f64 * table.energy(RELU32)? + macs as f64 * table.conventional_mac()?,
    })
}

/// Cost of one layer applied to an input of `input_shape`.
///
/// Comparisons (max-pool, argmax) are charged `E(CompareRNS)` on the RNS side
/// only; the binary side compares by sign bit, like its ReLU.
pub fn layer_cost(layer: &LayerSpec, input_shape: &[usize], table: &EnergyTable) -> Result<LayerCost, EnergyError> {
    let elems: u64 = input_shape.iter().product::<usize>() as u64;
    let mut cost = match layer {
        LayerSpec::Conv2d(_) | LayerSpec::FullyConnected(_) => op_cost(layer_macs(layer, input_shape), 0, table)?,
        LayerSpec::Relu => op_cost(0, elems, table)?,
        LayerSpec::MaxPool(p) => {
            let (oh, ow) = p.output_hw(input_shape[1], input_shape[2]);
            let compares = (input_shape[0] * oh * ow * (p.kernel_h * p.kernel_w - 1)) as u64;
            compare_cost(compares, table)?
        }
        LayerSpec::ArgMax => compare_cost(elems.saturating_sub(1), table)?,
    };
    cost.kind = layer.kind().to_string();
    Ok(cost)
}

fn compare_cost(compares: u64, table: &EnergyTable) -> Result<LayerCost, EnergyError> {
    Ok(LayerCost {
        kind: String::new(),
        mac_count: 0,
        relu_count: 0,
        compare_count: compares,
        energy_rns: compares as f64 * table.energy(COMPARE_RNS)?,
        energy_conventional: 0.0,
    })
}

/// Which side of the break-even width RNS is cheaper on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// RNS MACs are cheaper: RNS wins for layer widths above the ratio.
    RnsWinsAbove,
    /// RNS MACs are dearer: RNS wins only below the ratio.
    RnsWinsBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakEven {
    /// `(E_ReLU - E_RNSReLU) / ((E_RNSMult + E_RNSAdd) - (E_Mult + E_Add))`
    pub ratio: f64,
    pub regime: Regime,
}

impl BreakEven {
    /// Smallest integer width at which RNS is no more expensive, for
    /// [`Regime::RnsWinsAbove`].
    pub fn min_width(&self) -> u64 {
        self.ratio.max(1.0).ceil() as u64
    }

    pub fn describe(&self) -> String {
        match self.regime {
            Regime::RnsWinsAbove => format!("RNS cheaper for layer width X >= {}", self.min_width()),
            Regime::RnsWinsBelow => format!("RNS cheaper only for layer width X < {:.5}", self.ratio),
        }
    }
}

/// Layer width `X` at which a `Y x X` layer with ReLU costs the same in RNS
/// and in binary. Comparator and conversion costs are not part of it.
pub fn break_even(table: &EnergyTable) -> Result<BreakEven, EnergyError> {
    let numerator = table.energy(RELU32)? - table.energy(RELU_RNS)?;
    let denominator = table.rns_mac()? - table.conventional_mac()?;
    if denominator == 0.0 {
        return Err(EnergyError::Degenerate);
    }
    Ok(BreakEven {
        ratio: numerator / denominator,
        regime: if denominator < 0.0 {
            Regime::RnsWinsAbove
        } else {
            Regime::RnsWinsBelow
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub layers: Vec<LayerCost>,
    pub input_elements: u64,
    /// `input_elements * E(ConvertToRNS)`, RNS side only.
    pub conversion_rns: f64,
    pub total_rns: f64,
    pub total_conventional: f64,
    pub break_even: Option<BreakEven>,
}

impl EnergyReport {
    /// `total_rns / total_conventional`, if the latter is nonzero.
    pub fn ratio(&self) -> Option<f64> {
        (self.total_conventional != 0.0).then(|| self.total_rns / self.total_conventional)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.layers.iter().enumerate() {
            out += &format!(
                "layer {i} {} macs={} relus={} compares={} rns_pj={:.3} conventional_pj={:.3}\n",
                l.kind, l.mac_count, l.relu_count, l.compare_count, l.energy_rns, l.energy_conventional
            );
        }
        out += &format!(
            "conversion inputs={} rns_pj={:.3}\n",
            self.input_elements, self.conversion_rns
        );
        out += &format!(
            "total rns_pj={:.3} conventional_pj={:.3}\n",
            self.total_rns, self.total_conventional
        );
        match self.ratio() {
            Some(r) => out += &format!("ratio rns/conventional={r:.3}\n"),
            None => out += "ratio rns/conventional=n/a\n",
        }
        match &self.break_even {
            Some(b) => out += &format!("break_even ≈ {:.3} (ratio {:.5}; {})\n", b.ratio, b.ratio, b.describe()),
            None => out += "break_even n/a (degenerate model)\n",
        }
        out += &format!("note: {MEMORY_CAVEAT}\n");
        out
    }

    /// Energies rounded to 3 decimal places.
    pub fn to_json(&self) -> serde_json::Value {
        let r3 = |x: f64| (x * 1000.0).round() / 1000.0;
        json!({
            "layers": self.layers.iter().map(|l| json!({
                "kind": l.kind,
                "mac_count": l.mac_count,
                "relu_count": l.relu_count,
                "compare_count": l.compare_count,
                "energy_rns_pj": r3(l.energy_rns),
                "energy_conventional_pj": r3(l.energy_conventional),
            })).collect::<Vec<_>>(),
            "input_elements": self.input_elements,
            "conversion_rns_pj": r3(self.conversion_rns),
            "total_rns_pj": r3(self.total_rns),
            "total_conventional_pj": r3(self.total_conventional),
            "ratio": self.ratio().map(r3),
            "break_even": self.break_even.map(|b| json!({
                "ratio": (b.ratio * 1e4).round() / 1e4,
                "regime": b.regime,
                "min_width": b.min_width(),
            })),
            "note": MEMORY_CAVEAT,
        })
    }
}

/// Per-layer and total energy for one inference, including input conversion
/// (once per input element) on the RNS side.
pub fn network_energy_report(net: &NetworkSpec, table: &EnergyTable) -> Result<EnergyReport, EnergyError> {
    let shapes = net.layer_shapes().map_err(|e| EnergyError::Network(e.to_string()))?;
    let layers = net
        .layers
        .iter()
        .zip(&shapes)
        .map(|(layer, shape)| layer_cost(layer, shape, table))
        .collect::<Result<Vec<_>, _>>()?;
    let input_elements = net.input_len() as u64;
    let conversion_rns = input_elements as f64 * table.energy(CONVERT_TO_RNS)?;
    let total_rns = conversion_rns + layers.iter().map(|l| l.energy_rns).sum::<f64>();
    let total_conventional = layers.iter().map(|l| l.energy_conventional).sum();
    Ok(EnergyReport {
        layers,
        input_elements,
        conversion_rns,
        total_rns,
        total_conventional,
        break_even: break_even(table).ok(),
    })
}
