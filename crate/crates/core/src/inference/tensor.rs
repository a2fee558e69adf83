use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::rns::{ModuliSet, RnsInt};

/// Row-major signed integer tensor. Also the on-disk tensor format
/// `{ "shape": [...], "data": [...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawTensor")]
pub struct IntTensor {
    shape: Vec<usize>,
    data: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTensor {
    shape: Vec<usize>,
    data: Vec<i64>,
}

impl TryFrom<RawTensor> for IntTensor {
    type Error = InferenceError;

    fn try_from(raw: RawTensor) -> Result<Self, Self::Error> {
        IntTensor::new(raw.shape, raw.data)
    }
}

impl IntTensor {
    pub fn new(shape: Vec<usize>, data: Vec<i64>) -> Result<Self, InferenceError> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(InferenceError::Tensor(format!(
                "shape {shape:?} needs {expected} elements, got {}",
                data.len()
            )));
        }
        Ok(IntTensor { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        IntTensor {
            shape,
            data: vec![0; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<i64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn max_abs(&self) -> u64 {
        self.data.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn from_json(text: &str) -> Result<Self, InferenceError> {
        serde_json::from_str(text).map_err(InferenceError::Format)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tensor serializes")
    }
}

/// Tensor of residue tuples, all canonical under one moduli set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnsTensor {
    shape: Vec<usize>,
    data: Vec<RnsInt>,
}

impl RnsTensor {
    pub fn encode(t: &IntTensor, ms: &ModuliSet) -> Result<Self, InferenceError> {
        let data = t
            .data()
            .iter()
            .map(|&v| ms.encode_signed(v))
            .collect::<Result<_, _>>()?;
        Ok(RnsTensor {
            shape: t.shape().to_vec(),
            data,
        })
    }

    pub fn decode(&self, ms: &ModuliSet) -> Result<IntTensor, InferenceError> {
        let data = self
            .data
            .iter()
            .map(|x| ms.decode_signed(x))
            .collect::<Result<_, _>>()?;
        IntTensor::new(self.shape.clone(), data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[RnsInt] {
        &self.data
    }
}
