#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rnsnet::inference::{
    check_overflow_bound, signed_limit, Conv2d, FullyConnected, IntTensor, LayerSpec, MaxPool, NetworkSpec,
};

pub fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn weights(rng: &mut impl Rng, count: usize, limit: i64) -> Vec<i64> {
    (0..count).map(|_| rng.gen_range(-limit..=limit)).collect()
}

fn maybe_bias(rng: &mut impl Rng, count: usize, limit: i64) -> Option<Vec<i64>> {
    rng.gen_bool(0.5).then(|| weights(rng, count, limit))
}

/// A random conv/FC/ReLU/max-pool network with `bits`-bit weights that
/// passes the overflow bound at `n`. Most end in argmax.
pub fn random_network(rng: &mut impl Rng, n: u32, bits: u32) -> NetworkSpec {
    let ms = rnsnet::ModuliSet::new(n).unwrap();
    loop {
        let net = draw_network(rng, n, bits);
        if check_overflow_bound(&net, &ms).passed() {
            return net;
        }
    }
}

// smaller magnitudes keep deeper nets inside the bound
fn pick_limit(rng: &mut impl Rng, full: i64) -> i64 {
    *[full, full, (full / 4).max(1), 3.min(full), 1].choose(rng).unwrap()
}

fn draw_network(rng: &mut impl Rng, n: u32, bits: u32) -> NetworkSpec {
    let full = signed_limit(bits) as i64;
    let mut layers = Vec::new();
    let mut shape: Vec<usize>;
    if rng.gen_bool(0.6) {
        let c = rng.gen_range(1..=3);
        shape = vec![c, rng.gen_range(3..=8), rng.gen_range(3..=8)];
    } else {
        shape = vec![rng.gen_range(1..=16)];
    }
    let input_shape = shape.clone();
    if shape.len() == 3 {
        for _ in 0..rng.gen_range(1..=2) {
            let (ch, h, w) = (shape[0], shape[1], shape[2]);
            let groups = if ch % 2 == 0 && rng.gen_bool(0.3) { 2 } else { 1 };
            let out_channels = groups * rng.gen_range(1..=3);
            let kernel_h = rng.gen_range(1..=3.min(h + 2));
            let kernel_w = rng.gen_range(1..=3.min(w + 2));
            let pad_h = rng.gen_range(0..=1);
            let pad_w = rng.gen_range(0..=1);
            if h + 2 * pad_h < kernel_h || w + 2 * pad_w < kernel_w {
                break;
            }
            let stride = rng.gen_range(1..=2);
            let lim = pick_limit(rng, full);
            let conv = Conv2d {
                out_channels,
                in_channels: ch,
                kernel_h,
                kernel_w,
                stride_h: stride,
                stride_w: stride,
                pad_h,
                pad_w,
                groups,
                weights: Some(weights(rng, out_channels * (ch / groups) * kernel_h * kernel_w, lim)),
                bias: maybe_bias(rng, out_channels, lim),
            };
            let (oh, ow) = conv.output_hw(h, w);
            layers.push(LayerSpec::Conv2d(conv));
            shape = vec![out_channels, oh, ow];
            if rng.gen_bool(0.7) {
                layers.push(LayerSpec::Relu);
            }
            if shape[1] >= 2 && shape[2] >= 2 && rng.gen_bool(0.4) {
                let pool = MaxPool {
                    kernel_h: 2,
                    kernel_w: 2,
                    stride_h: rng.gen_range(1..=2),
                    stride_w: rng.gen_range(1..=2),
                };
                let (oh, ow) = pool.output_hw(shape[1], shape[2]);
                layers.push(LayerSpec::MaxPool(pool));
                shape = vec![shape[0], oh, ow];
            }
        }
    }
    let fcs = if layers.is_empty() {
        rng.gen_range(1..=2)
    } else {
        rng.gen_range(0..=2)
    };
    for i in 0..fcs {
        let in_features: usize = shape.iter().product();
        let out_features = rng.gen_range(1..=10);
        let lim = pick_limit(rng, full);
        layers.push(LayerSpec::FullyConnected(FullyConnected {
            out_features,
            in_features,
            weights: Some(weights(rng, in_features * out_features, lim)),
            bias: maybe_bias(rng, out_features, lim),
        }));
        shape = vec![out_features];
        if i + 1 < fcs && rng.gen_bool(0.8) {
            layers.push(LayerSpec::Relu);
        }
    }
    if rng.gen_bool(0.8) {
        layers.push(LayerSpec::ArgMax);
    }
    NetworkSpec::new(n, bits, bits, input_shape, layers).expect("generated network is well-formed")
}

pub fn random_input(rng: &mut impl Rng, net: &NetworkSpec) -> IntTensor {
    let limit = signed_limit(net.activation_bits) as i64;
    let len = net.input_len();
    let data = match rng.gen_range(0..4) {
        0 => vec![0; len],
        1 => (0..len).map(|_| *[-limit, limit].choose(rng).unwrap()).collect(),
        _ => weights(rng, len, limit),
    };
    IntTensor::new(net.input_shape.clone(), data).unwrap()
}
