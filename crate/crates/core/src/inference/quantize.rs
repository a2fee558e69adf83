use super::network::signed_limit;
use super::tensor::IntTensor;
use super::InferenceError;
use crate::rns::ModuliSet;

/// Symmetric per-tensor quantization to `bits`-bit signed integers.
///
/// `scale = (2^(bits-1) - 1) / max|w|`, `q = clamp(round(w * scale))` with
/// ties rounded away from zero. An all-zero input yields zeros and scale 1.
pub fn quantize(values: &[f64], bits: u32) -> Result<(Vec<i64>, f64), InferenceError> {
    if !(2..=32).contains(&bits) {
        return Err(InferenceError::Quantize(format!("bit width {bits} outside 2..=32")));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(InferenceError::Quantize(format!("non-finite value {bad}")));
    }
    let limit = signed_limit(bits) as f64;
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if max_abs == 0.0 { 1.0 } else { limit / max_abs };
    let q = values
        .iter()
        .map(|v| (v * scale).round().clamp(-limit, limit) as i64)
        .collect();
    Ok((q, scale))
}

/// Bit widths for a quantized network, plus the scale chosen for each
/// weight tensor quantized through it (in call order).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationSpec {
    pub weight_bits: u32,
    pub activation_bits: u32,
    pub scales: Vec<f64>,
}

impl QuantizationSpec {
    /// Both widths must be at most `n - 1`, so a quantized value fits in the
    /// smallest residue channel.
    pub fn new(weight_bits: u32, activation_bits: u32, ms: &ModuliSet) -> Result<Self, InferenceError> {
        for bits in [weight_bits, activation_bits] {
            if bits < 2 || bits > ms.n() - 1 {
                return Err(InferenceError::Quantize(format!(
                    "bit width {bits} outside 2..={} for n = {}",
                    ms.n() - 1,
                    ms.n()
                )));
            }
        }
        Ok(QuantizationSpec {
            weight_bits,
            activation_bits,
            scales: vec![],
        })
    }

    pub fn quantize_weights(&mut self, shape: Vec<usize>, values: &[f64]) -> Result<IntTensor, InferenceError> {
        let (q, scale) = quantize(values, self.weight_bits)?;
        let t = IntTensor::new(shape, q)?;
        self.scales.push(scale);
        Ok(t)
    }

    /// Activations use their own width; the scale is returned, not recorded.
    pub fn quantize_activations(&self, shape: Vec<usize>, values: &[f64]) -> Result<(IntTensor, f64), InferenceError> {
        let (q, scale) = quantize(values, self.activation_bits)?;
        Ok((IntTensor::new(shape, q)?, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(quantize(&[0.0, 0.0], 6).unwrap(), (vec![0, 0], 1.0));
        let (q, s) = quantize(&[-1.0, 0.5, 1.0], 6).unwrap();
        assert_eq!(s, 31.0);
        assert_eq!(q, vec![-31, 16, 31]);
        let (q, _) = quantize(&[-0.5, 1.0], 6).unwrap();
        assert_eq!(q, vec![-16, 31]);
    }

    #[test]
    fn idempotent_on_full_scale_integers() {
        let w: Vec<f64> = (-31..=31).map(f64::from).collect();
        let (q, s) = quantize(&w, 6).unwrap();
        assert_eq!(s, 1.0);
        assert_eq!(q, (-31..=31).collect::<Vec<i64>>());
    }

    #[test]
    fn errors() {
        assert!(quantize(&[f64::NAN], 6).is_err());
        assert!(quantize(&[f64::INFINITY], 6).is_err());
        assert!(quantize(&[1.0], 1).is_err());
        let ms = ModuliSet::new(7).unwrap();
        assert!(QuantizationSpec::new(7, 6, &ms).is_err());
        let mut spec = QuantizationSpec::new(6, 6, &ms).unwrap();
        let t = spec.quantize_weights(vec![2, 2], &[0.1, -0.2, 0.4, 0.0]).unwrap();
        assert_eq!(t.data(), &[8, -16, 31, 0]);
        spec.quantize_weights(vec![1], &[2.0]).unwrap();
        assert_eq!(spec.scales, vec![77.5, 15.5]);
        assert!(spec.quantize_weights(vec![3], &[1.0]).is_err());
    }
}
