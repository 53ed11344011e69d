use crate::error::{Error, Result};

/// Standard-deviation multiples of the seven quantization points.
pub const LEVELS: [i32; 7] = [-3, -2, -1, 0, 1, 2, 3];

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Interval masses of the standard normal around each integer level: unit-width
/// bins for |k| <= 2, the remaining tail mass split evenly between k = -3 and k = 3.
pub fn seven_point_weights() -> [f64; 7] {
    let mut w = [0.0; 7];
    for (i, &k) in LEVELS.iter().enumerate().skip(1).take(5) {
        let k = k as f64;
        w[i] = normal_cdf(k + 0.5) - normal_cdf(k - 0.5);
    }
    let center: f64 = w[1..6].iter().sum();
    let tail = 0.5 * (1.0 - center);
    w[0] = tail;
    w[6] = tail;
    // Put the rounding residue on the central point so the weights sum to one.
    let residue = 1.0 - w.iter().sum::<f64>();
    w[3] += residue;
    w
}

/// A quantity quantized at `mean * (1 + direction * k * sigma_frac)` for k in -3..=3.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedFactor {
    pub sigma_frac: f64,
    pub direction: i32,
    pub weights: Vec<f64>,
    /// Deviate series per point, in level order.
    pub values: Vec<Vec<f64>>,
}

impl QuantizedFactor {
    pub fn points(&self) -> usize {
        self.weights.len().min(self.values.len())
    }

    /// Ratio of point `i` to the mean.
    pub fn multiplier(&self, i: usize) -> f64 {
        1.0 + self.direction as f64 * LEVELS[i] as f64 * self.sigma_frac
    }
}

pub fn seven_point_normal(mean: &[f64], sigma_frac: f64, direction: i32) -> Result<QuantizedFactor> {
    if !(sigma_frac >= 0.0) {
        return Err(Error::NegativeSigma(sigma_frac));
    }
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidArgument(format!(
            "direction must be +1 or -1, got {direction}"
        )));
    }
    if mean.iter().any(|m| !m.is_finite()) {
        return Err(Error::InvalidArgument("mean series must be finite".into()));
    }
    let mut factor = QuantizedFactor {
        sigma_frac,
        direction,
        weights: seven_point_weights().to_vec(),
        values: Vec::with_capacity(LEVELS.len()),
    };
    for i in 0..LEVELS.len() {
        let m = factor.multiplier(i);
        factor.values.push(mean.iter().map(|v| v * m).collect());
    }
    Ok(factor)
}
