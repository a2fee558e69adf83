//! Network description, validation and the JSON network file format.

use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::rns::ModuliSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conv2d {
    pub out_channels: usize,
    pub in_channels: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub stride_h: usize,
    pub stride_w: usize,
    pub pad_h: usize,
    pub pad_w: usize,
    /// Channel groups; weights are `[out, in / groups, kh, kw]`.
    pub groups: usize,
    /// Flat row-major weights, or `None` for a shape-only layer.
    pub weights: Option<Vec<i64>>,
    pub bias: Option<Vec<i64>>,
}

impl Conv2d {
    pub fn in_per_group(&self) -> usize {
        self.in_channels / self.groups
    }

    /// Weights feeding one output value, `C_in/groups * K_Y * K_X`.
    pub fn fan_in(&self) -> usize {
        self.in_per_group() * self.kernel_h * self.kernel_w
    }

    pub fn output_hw(&self, h: usize, w: usize) -> (usize, usize) {
        (
            (h + 2 * self.pad_h - self.kernel_h) / self.stride_h + 1,
            (w + 2 * self.pad_w - self.kernel_w) / self.stride_w + 1,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullyConnected {
    pub out_features: usize,
    pub in_features: usize,
    /// `[out, in]` row-major, or `None` for a shape-only layer.
    pub weights: Option<Vec<i64>>,
    pub bias: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxPool {
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub stride_h: usize,
    pub stride_w: usize,
}

impl MaxPool {
    pub fn output_hw(&self, h: usize, w: usize) -> (usize, usize) {
        (
            (h - self.kernel_h) / self.stride_h + 1,
            (w - self.kernel_w) / self.stride_w + 1,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSpec {
    Conv2d(Conv2d),
    FullyConnected(FullyConnected),
    Relu,
    MaxPool(MaxPool),
    /// Final layer only; yields a class index.
    ArgMax,
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Conv2d(_) => "conv2d",
            LayerSpec::FullyConnected(_) => "fc",
            LayerSpec::Relu => "relu",
            LayerSpec::MaxPool(_) => "maxpool",
            LayerSpec::ArgMax => "argmax",
        }
    }

    /// `(weights, bias, fan_in)` of a weighted layer.
    pub(crate) fn weighted(&self) -> Option<WeightView<'_>> {
        match self {
            LayerSpec::Conv2d(c) => Some((c.weights.as_deref(), c.bias.as_deref(), c.fan_in())),
            LayerSpec::FullyConnected(f) => Some((f.weights.as_deref(), f.bias.as_deref(), f.in_features)),
            _ => None,
        }
    }

    /// Output shape for a given input shape; `[]` denotes a class index.
    pub fn output_shape(&self, index: usize, input: &[usize]) -> Result<Vec<usize>, InferenceError> {
        let err = |msg: String| InferenceError::Shape { layer: index, msg };
        match self {
            LayerSpec::Conv2d(c) => {
                let &[ch, h, w] = input else {
                    return Err(err(format!("conv2d needs a [c, h, w] input, got {input:?}")));
                };
                if ch != c.in_channels {
                    return Err(err(format!(
                        "conv2d expects {} input channels, got {ch}",
                        c.in_channels
                    )));
                }
                if c.kernel_h + c.kernel_w == 0 || h + 2 * c.pad_h < c.kernel_h || w + 2 * c.pad_w < c.kernel_w {
                    return Err(err(format!(
                        "kernel {}x{} does not fit padded input {}x{}",
                        c.kernel_h,
                        c.kernel_w,
                        h + 2 * c.pad_h,
                        w + 2 * c.pad_w
                    )));
                }
                let (oh, ow) = c.output_hw(h, w);
                Ok(vec![c.out_channels, oh, ow])
            }
            LayerSpec::FullyConnected(f) => {
                let features: usize = input.iter().product();
                if input.is_empty() || features != f.in_features {
                    return Err(err(format!(
                        "fc expects {} input features, got shape {input:?}",
                        f.in_features
                    )));
                }
                Ok(vec![f.out_features])
            }
            LayerSpec::Relu => {
                if input.is_empty() {
                    return Err(err("relu after argmax".into()));
                }
                Ok(input.to_vec())
            }
            LayerSpec::MaxPool(p) => {
                let &[ch, h, w] = input else {
                    return Err(err(format!("maxpool needs a [c, h, w] input, got {input:?}")));
                };
                if h < p.kernel_h || w < p.kernel_w {
                    return Err(err(format!(
                        "pool window {}x{} larger than input {h}x{w}",
                        p.kernel_h, p.kernel_w
                    )));
                }
                let (oh, ow) = p.output_hw(h, w);
                Ok(vec![ch, oh, ow])
            }
            LayerSpec::ArgMax => {
                if input.iter().product::<usize>() == 0 || input.is_empty() {
                    return Err(err(format!("argmax over empty shape {input:?}")));
                }
                Ok(vec![])
            }
        }
    }
}

pub(crate) type WeightView<'a> = (Option<&'a [i64]>, Option<&'a [i64]>, usize);

/// A validated network: shapes chain, weight counts and bit widths hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    pub n: u32,
    pub weight_bits: u32,
    pub activation_bits: u32,
    pub input_shape: Vec<usize>,
    pub layers: Vec<LayerSpec>,
}

/// Largest magnitude representable in `bits`-bit symmetric signed form.
pub fn signed_limit(bits: u32) -> u64 {
    (1u64 << (bits - 1)) - 1
}

impl NetworkSpec {
    pub const MAX_BITS: u32 = 32;

    pub fn new(
        n: u32,
        weight_bits: u32,
        activation_bits: u32,
        input_shape: Vec<usize>,
        layers: Vec<LayerSpec>,
    ) -> Result<Self, InferenceError> {
        let net = NetworkSpec {
            n,
            weight_bits,
            activation_bits,
            input_shape,
            layers,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn moduli(&self) -> Result<ModuliSet, InferenceError> {
        Ok(ModuliSet::new(self.n)?)
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        self.moduli()?;
        for (name, bits) in [
            ("weight_bits", self.weight_bits),
            ("activation_bits", self.activation_bits),
        ] {
            if !(1..=Self::MAX_BITS).contains(&bits) {
                return Err(InferenceError::Config(format!(
                    "{name} = {bits} outside 1..={}",
                    Self::MAX_BITS
                )));
            }
        }
        let weight_limit = signed_limit(self.weight_bits);
        for (i, layer) in self.layers.iter().enumerate() {
            if matches!(layer, LayerSpec::ArgMax) && i + 1 != self.layers.len() {
                return Err(InferenceError::Shape {
                    layer: i,
                    msg: "argmax must be the final layer".into(),
                });
            }
            let werr = |msg: String| InferenceError::Weights { layer: i, msg };
            let (out, expected_weights) = match layer {
                LayerSpec::Conv2d(c) => {
                    if c.groups == 0 || c.in_channels % c.groups != 0 || c.out_channels % c.groups != 0 {
                        return Err(werr(format!(
                            "groups = {} must divide in_channels = {} and out_channels = {}",
                            c.groups, c.in_channels, c.out_channels
                        )));
                    }
                    if c.stride_h == 0 || c.stride_w == 0 {
                        return Err(werr("stride must be positive".into()));
                    }
                    (c.out_channels, c.out_channels * c.fan_in())
                }
                LayerSpec::FullyConnected(f) => (f.out_features, f.out_features * f.in_features),
                LayerSpec::MaxPool(p) => {
                    if p.stride_h == 0 || p.stride_w == 0 || p.kernel_h == 0 || p.kernel_w == 0 {
                        return Err(werr("pool window and stride must be positive".into()));
                    }
                    continue;
                }
                _ => continue,
            };
            let (weights, bias, _) = layer.weighted().unwrap();
            if let Some(w) = weights {
                if w.len() != expected_weights {
                    return Err(werr(format!("expected {expected_weights} weights, got {}", w.len())));
                }
                if let Some(bad) = w.iter().find(|v| v.unsigned_abs() > weight_limit) {
                    return Err(werr(format!(
                        "weight {bad} exceeds the {}-bit bound {weight_limit}",
                        self.weight_bits
                    )));
                }
            }
            if let Some(b) = bias {
                if b.len() != out {
                    return Err(werr(format!("expected {out} biases, got {}", b.len())));
                }
            }
        }
        self.layer_shapes().map(|_| ())
    }

    /// Input shape of every layer followed by the final output shape.
    pub fn layer_shapes(&self) -> Result<Vec<Vec<usize>>, InferenceError> {
        let mut shapes = vec![self.input_shape.clone()];
        for (i, layer) in self.layers.iter().enumerate() {
            let next = layer.output_shape(i, shapes.last().unwrap())?;
            shapes.push(next);
        }
        Ok(shapes)
    }

    pub fn output_shape(&self) -> Result<Vec<usize>, InferenceError> {
        Ok(self.layer_shapes()?.pop().unwrap())
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn ends_in_argmax(&self) -> bool {
        matches!(self.layers.last(), Some(LayerSpec::ArgMax))
    }

    pub fn from_json(text: &str) -> Result<Self, InferenceError> {
        let file: NetworkFile = serde_json::from_str(text).map_err(InferenceError::Format)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetworkFile::from(self)).expect("network serializes")
    }
}

// ---- file format ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    n: u32,
    weight_bits: u32,
    activation_bits: u32,
    input_shape: Vec<usize>,
    layers: Vec<LayerFile>,
}

fn one() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PaddingMode {
    Same,
    Valid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum PaddingFile {
    Explicit([usize; 2]),
    Named(PaddingMode),
}

impl Default for PaddingFile {
    fn default() -> Self {
        PaddingFile::Named(PaddingMode::Valid)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum LayerFile {
    Conv2d {
        out_channels: usize,
        in_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        #[serde(default = "one")]
        stride_h: usize,
        #[serde(default = "one")]
        stride_w: usize,
        #[serde(default)]
        padding: PaddingFile,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        groups: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bias: Option<Vec<i64>>,
    },
    Fc {
        out_features: usize,
        in_features: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bias: Option<Vec<i64>>,
    },
    Relu {},
    Maxpool {
        kernel_h: usize,
        kernel_w: usize,
        stride_h: usize,
        stride_w: usize,
    },
    Argmax {},
}

impl TryFrom<NetworkFile> for NetworkSpec {
    type Error = InferenceError;

    fn try_from(f: NetworkFile) -> Result<Self, Self::Error> {
        let layers = f
            .layers
            .into_iter()
            .map(|l| match l {
                LayerFile::Conv2d {
                    out_channels,
                    in_channels,
                    kernel_h,
                    kernel_w,
                    stride_h,
                    stride_w,
                    padding,
                    groups,
                    weights,
                    bias,
                } => {
                    // "same" keeps the size for stride 1 and odd kernels
                    let (pad_h, pad_w) = match padding {
                        PaddingFile::Explicit([ph, pw]) => (ph, pw),
                        PaddingFile::Named(PaddingMode::Valid) => (0, 0),
                        PaddingFile::Named(PaddingMode::Same) => {
                            (kernel_h.saturating_sub(1) / 2, kernel_w.saturating_sub(1) / 2)
                        }
                    };
                    LayerSpec::Conv2d(Conv2d {
                        out_channels,
                        in_channels,
                        kernel_h,
                        kernel_w,
                        stride_h,
                        stride_w,
                        pad_h,
                        pad_w,
                        groups,
                        weights,
                        bias,
                    })
                }
                LayerFile::Fc {
                    out_features,
                    in_features,
                    weights,
                    bias,
                } => LayerSpec::FullyConnected(FullyConnected {
                    out_features,
                    in_features,
                    weights,
                    bias,
                }),
                LayerFile::Relu {} => LayerSpec::Relu,
                LayerFile::Maxpool {
                    kernel_h,
                    kernel_w,
                    stride_h,
                    stride_w,
                } => LayerSpec::MaxPool(MaxPool {
                    kernel_h,
                    kernel_w,
                    stride_h,
                    stride_w,
                }),
                LayerFile::Argmax {} => LayerSpec::ArgMax,
            })
            .collect();
        NetworkSpec::new(f.n, f.weight_bits, f.activation_bits, f.input_shape, layers)
    }
}

impl From<&NetworkSpec> for NetworkFile {
    fn from(net: &NetworkSpec) -> Self {
        let layers = net
            .layers
            .iter()
            .map(|l| match l {
                LayerSpec::Conv2d(c) => LayerFile::Conv2d {
                    out_channels: c.out_channels,
                    in_channels: c.in_channels,
                    kernel_h: c.kernel_h,
                    kernel_w: c.kernel_w,
                    stride_h: c.stride_h,
                    stride_w: c.stride_w,
                    padding: PaddingFile::Explicit([c.pad_h, c.pad_w]),
                    groups: c.groups,
                    weights: c.weights.clone(),
                    bias: c.bias.clone(),
                },
                LayerSpec::FullyConnected(f) => LayerFile::Fc {
                    out_features: f.out_features,
                    in_features: f.in_features,
                    weights: f.weights.clone(),
                    bias: f.bias.clone(),
                },
                LayerSpec::Relu => LayerFile::Relu {},
                LayerSpec::MaxPool(p) => LayerFile::Maxpool {
                    kernel_h: p.kernel_h,
                    kernel_w: p.kernel_w,
                    stride_h: p.stride_h,
                    stride_w: p.stride_w,
                },
                LayerSpec::ArgMax => LayerFile::Argmax {},
            })
            .collect();
        NetworkFile {
            n: net.n,
            weight_bits: net.weight_bits,
            activation_bits: net.activation_bits,
            input_shape: net.input_shape.clone(),
            layers,
        }
    }
}
