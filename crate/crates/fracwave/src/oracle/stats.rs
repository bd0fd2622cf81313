use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Sample mean with its standard error sqrt(var / n).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate<T> {
    pub mean: T,
    pub std_error: f64,
    pub count: usize,
}

pub fn real_mean(samples: &[f64]) -> MeanEstimate<f64> {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = if n > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    MeanEstimate { mean, std_error: (var / n as f64).sqrt(), count: n }
}

/// Complex mean; the standard error uses E|z - mean|^2.
pub fn complex_mean(samples: &[Complex64]) -> MeanEstimate<Complex64> {
    let n = samples.len();
    let mean = samples.iter().sum::<Complex64>() / n as f64;
    let var = if n > 1 { samples.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    MeanEstimate { mean, std_error: (var / n as f64).sqrt(), count: n }
}

/// Jarque-Bera normality statistic with its chi-square(2) p-value exp(-JB/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JarqueBera {
    pub statistic: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub p_value: f64,
}

pub fn jarque_bera(samples: &[f64]) -> JarqueBera {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = samples.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    let statistic = n / 6.0 * (skewness * skewness + 0.25 * excess_kurtosis * excess_kurtosis);
    JarqueBera { statistic, skewness, excess_kurtosis, p_value: (-0.5 * statistic).exp() }
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
