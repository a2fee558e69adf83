use super::network::{LayerSpec, NetworkSpec};
use super::InferenceError;

/// Multiply-accumulates performed by one layer on an input of `input_shape`.
///
/// FC: `X * Y`. Conv2D: `out_h * out_w * C_out * (C_in / groups) * K_Y * K_X`.
pub fn layer_macs(layer: &LayerSpec, input_shape: &[usize]) -> u64 {
    match layer {
        LayerSpec::FullyConnected(f) => (f.out_features * f.in_features) as u64,
        LayerSpec::Conv2d(c) => {
            let (oh, ow) = c.output_hw(input_shape[1], input_shape[2]);
            (oh * ow * c.out_channels * c.fan_in()) as u64
        }
        LayerSpec::Relu | LayerSpec::MaxPool(_) | LayerSpec::ArgMax => 0,
    }
}

pub fn mac_breakdown(net: &NetworkSpec) -> Result<Vec<u64>, InferenceError> {
    let shapes = net.layer_shapes()?;
    Ok(net
        .layers
        .iter()
        .zip(&shapes)
        .map(|(layer, shape)| layer_macs(layer, shape))
        .collect())
}

pub fn count_macs(net: &NetworkSpec) -> Result<u64, InferenceError> {
    Ok(mac_breakdown(net)?.iter().sum())
}
