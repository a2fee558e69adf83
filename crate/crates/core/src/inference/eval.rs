use rayon::prelude::*;

use super::bound::check_overflow_bound;
use super::network::{signed_limit, Conv2d, FullyConnected, LayerSpec, MaxPool, NetworkSpec};
use super::tensor::{IntTensor, RnsTensor};
use super::InferenceError;
use crate::rns::{ModuliSet, RnsInt};

/// Result of running a network: the final activations, or a class index
/// when the network ends in argmax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Tensor(IntTensor),
    Class(usize),
}

/// Arithmetic the layers need: MAC, ReLU and signed comparison.
trait Arith: Sync {
    type T: Copy + Send + Sync;

    fn lift(&self, v: i64) -> Result<Self::T, InferenceError>;
    fn zero(&self) -> Self::T;
    fn mac(&self, acc: Self::T, a: Self::T, b: Self::T) -> Self::T;
    fn relu(&self, x: Self::T) -> Self::T;
    /// Signed `a >= b`.
    fn ge(&self, a: Self::T, b: Self::T) -> bool;
    /// Lowest index among the maxima.
    fn argmax(&self, xs: &[Self::T]) -> usize;
}

struct Exact;

impl Arith for Exact {
    type T = i64;

    fn lift(&self, v: i64) -> Result<i64, InferenceError> {
        Ok(v)
    }
    fn zero(&self) -> i64 {
        0
    }
    fn mac(&self, acc: i64, a: i64, b: i64) -> i64 {
        acc + a * b
    }
    fn relu(&self, x: i64) -> i64 {
        x.max(0)
    }
    fn ge(&self, a: i64, b: i64) -> bool {
        a >= b
    }
    fn argmax(&self, xs: &[i64]) -> usize {
        let mut best = 0;
        for (i, &x) in xs.iter().enumerate() {
            if x > xs[best] {
                best = i;
            }
        }
        best
    }
}

struct Residue<'a>(&'a ModuliSet);

impl Arith for Residue<'_> {
    type T = RnsInt;

    fn lift(&self, v: i64) -> Result<RnsInt, InferenceError> {
        Ok(self.0.encode_signed(v)?)
    }
    fn zero(&self) -> RnsInt {
        RnsInt::ZERO
    }
    fn mac(&self, acc: RnsInt, a: RnsInt, b: RnsInt) -> RnsInt {
        self.0.mac(&acc, &a, &b)
    }
    fn relu(&self, x: RnsInt) -> RnsInt {
        self.0.relu(&x)
    }
    fn ge(&self, a: RnsInt, b: RnsInt) -> bool {
        self.0.compare_signed_ge(&a, &b)
    }
    fn argmax(&self, xs: &[RnsInt]) -> usize {
        self.0.argmax(xs).expect("argmax input validated non-empty")
    }
}

/// Layer parameters converted into the evaluation domain.
enum Prepared<T> {
    Weighted { weights: Vec<T>, bias: Option<Vec<T>> },
    Plain,
}

struct Model<'n, A: Arith> {
    net: &'n NetworkSpec,
    arith: A,
    params: Vec<Prepared<A::T>>,
}

enum Value<T> {
    Tensor(Vec<usize>, Vec<T>),
    Class(usize),
}

impl<'n, A: Arith> Model<'n, A> {
    fn new(net: &'n NetworkSpec, arith: A) -> Result<Self, InferenceError> {
        let lift_all =
            |xs: &[i64]| -> Result<Vec<A::T>, InferenceError> { xs.iter().map(|&v| arith.lift(v)).collect() };
        let params = net
            .layers
            .iter()
            .enumerate()
            .map(|(i, layer)| match layer.weighted() {
                None => Ok(Prepared::Plain),
                Some((None, _, _)) => Err(InferenceError::MissingWeights {
                    layer: i,
                    kind: layer.kind(),
                }),
                Some((Some(w), b, _)) => Ok(Prepared::Weighted {
                    weights: lift_all(w)?,
                    bias: b.map(lift_all).transpose()?,
                }),
            })
            .collect::<Result<_, _>>()?;
        Ok(Model { net, arith, params })
    }

    fn run(&self, input: Vec<A::T>) -> Value<A::T> {
        let mut shape = self.net.input_shape.clone();
        let mut data = input;
        for (layer, params) in self.net.layers.iter().zip(&self.params) {
            let (next_shape, next) = match (layer, params) {
                (LayerSpec::Conv2d(c), Prepared::Weighted { weights, bias }) => {
                    conv2d(&self.arith, c, &shape, &data, weights, bias.as_deref())
                }
                (LayerSpec::FullyConnected(f), Prepared::Weighted { weights, bias }) => {
                    fully_connected(&self.arith, f, &data, weights, bias.as_deref())
                }
                (LayerSpec::Relu, _) => {
                    let out = data.iter().map(|&x| self.arith.relu(x)).collect();
                    (shape.clone(), out)
                }
                (LayerSpec::MaxPool(p), _) => max_pool(&self.arith, p, &shape, &data),
                (LayerSpec::ArgMax, _) => return Value::Class(self.arith.argmax(&data)),
                _ => unreachable!("weighted layers are prepared"),
            };
            shape = next_shape;
            data = next;
        }
        Value::Tensor(shape, data)
    }
}

fn conv2d<A: Arith>(
    arith: &A,
    c: &Conv2d,
    shape: &[usize],
    input: &[A::T],
    weights: &[A::T],
    bias: Option<&[A::T]>,
) -> (Vec<usize>, Vec<A::T>) {
    let (h, w) = (shape[1], shape[2]);
    let (oh, ow) = c.output_hw(h, w);
    let in_per_group = c.in_per_group();
    let out_per_group = c.out_channels / c.groups;
    let fan_in = c.fan_in();
    let mut out = vec![arith.zero(); c.out_channels * oh * ow];
    out.par_chunks_mut(oh * ow).enumerate().for_each(|(o, plane)| {
        let first_in = (o / out_per_group) * in_per_group;
        let kernel = &weights[o * fan_in..(o + 1) * fan_in];
        let b = bias.map_or(arith.zero(), |b| b[o]);
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = b;
                for ci in 0..in_per_group {
                    let channel = &input[(first_in + ci) * h * w..(first_in + ci + 1) * h * w];
                    for ky in 0..c.kernel_h {
                        // zero padding contributes nothing
                        let Some(iy) = (oy * c.stride_h + ky).checked_sub(c.pad_h).filter(|&y| y < h) else {
                            continue;
                        };
                        for kx in 0..c.kernel_w {
                            let Some(ix) = (ox * c.stride_w + kx).checked_sub(c.pad_w).filter(|&x| x < w) else {
                                continue;
                            };
                            let k = kernel[(ci * c.kernel_h + ky) * c.kernel_w + kx];
                            acc = arith.mac(acc, channel[iy * w + ix], k);
                        }
                    }
                }
                plane[oy * ow + ox] = acc;
            }
        }
    });
    (vec![c.out_channels, oh, ow], out)
}

fn fully_connected<A: Arith>(
    arith: &A,
    f: &FullyConnected,
    input: &[A::T],
    weights: &[A::T],
    bias: Option<&[A::T]>,
) -> (Vec<usize>, Vec<A::T>) {
    let out = (0..f.out_features)
        .into_par_iter()
        .map(|j| {
            let row = &weights[j * f.in_features..(j + 1) * f.in_features];
            let init = bias.map_or(arith.zero(), |b| b[j]);
            row.iter().zip(input).fold(init, |acc, (&w, &x)| arith.mac(acc, x, w))
        })
        .collect();
    (vec![f.out_features], out)
}

fn max_pool<A: Arith>(arith: &A, p: &MaxPool, shape: &[usize], input: &[A::T]) -> (Vec<usize>, Vec<A::T>) {
    let (ch, h, w) = (shape[0], shape[1], shape[2]);
    let (oh, ow) = p.output_hw(h, w);
    let mut out = Vec::with_capacity(ch * oh * ow);
    for c in 0..ch {
        let plane = &input[c * h * w..(c + 1) * h * w];
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = plane[oy * p.stride_h * w + ox * p.stride_w];
                for ky in 0..p.kernel_h {
                    for kx in 0..p.kernel_w {
                        let x = plane[(oy * p.stride_h + ky) * w + ox * p.stride_w + kx];
                        if !arith.ge(best, x) {
                            best = x;
                        }
                    }
                }
                out.push(best);
            }
        }
    }
    (vec![ch, oh, ow], out)
}

fn check_input(net: &NetworkSpec, input: &IntTensor) -> Result<(), InferenceError> {
    if input.shape() != net.input_shape.as_slice() {
        return Err(InferenceError::Input(format!(
            "shape {:?} does not match the network input shape {:?}",
            input.shape(),
            net.input_shape
        )));
    }
    let limit = signed_limit(net.activation_bits);
    if let Some(v) = input.data().iter().find(|v| v.unsigned_abs() > limit) {
        return Err(InferenceError::Input(format!(
            "value {v} exceeds the {}-bit activation bound {limit}",
            net.activation_bits
        )));
    }
    Ok(())
}

fn check_bound(net: &NetworkSpec, ms: &ModuliSet) -> Result<(), InferenceError> {
    match check_overflow_bound(net, ms).violation {
        Some(v) => Err(InferenceError::Overflow(v)),
        None => Ok(()),
    }
}

/// Reference evaluation with exact `i64` arithmetic.
///
/// Refuses networks failing the overflow bound for the network's own `n`,
/// since their residue evaluation would not match.
pub fn infer_int(net: &NetworkSpec, input: &IntTensor) -> Result<Output, InferenceError> {
    check_input(net, input)?;
    check_bound(net, &net.moduli()?)?;
    let model = Model::new(net, Exact)?;
    Ok(match model.run(input.data().to_vec()) {
        Value::Class(i) => Output::Class(i),
        Value::Tensor(shape, data) => Output::Tensor(IntTensor::new(shape, data)?),
    })
}

/// A network with its weights encoded once, for repeated residue evaluation.
pub struct RnsModel<'n, 'm> {
    model: Model<'n, Residue<'m>>,
    ms: &'m ModuliSet,
}

impl<'n, 'm> RnsModel<'n, 'm> {
    pub fn new(net: &'n NetworkSpec, ms: &'m ModuliSet) -> Result<Self, InferenceError> {
        check_bound(net, ms)?;
        Ok(RnsModel {
            model: Model::new(net, Residue(ms))?,
            ms,
        })
    }

    pub fn infer(&self, input: &IntTensor) -> Result<Output, InferenceError> {
        let net = self.model.net;
        check_input(net, input)?;
        let encoded = RnsTensor::encode(input, self.ms)?;
        Ok(match self.model.run(encoded.data().to_vec()) {
            Value::Class(i) => Output::Class(i),
            Value::Tensor(shape, data) => {
                // decode only at the very end, for reporting
                let decoded = data
                    .iter()
                    .map(|x| self.ms.decode_signed(x))
                    .collect::<Result<_, _>>()?;
                Output::Tensor(IntTensor::new(shape, decoded)?)
            }
        })
    }
}

/// Evaluates every MAC, ReLU, pool and the final argmax in residue form.
pub fn infer_rns(net: &NetworkSpec, input: &IntTensor, ms: &ModuliSet) -> Result<Output, InferenceError> {
    RnsModel::new(net, ms)?.infer(input)
}
