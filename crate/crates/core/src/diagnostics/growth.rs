use serde::Serialize;

/// Asymptotic class of a partial integral `I(R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    Bounded,
    Log,
    LogLog,
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    DivergentTrend,
    ConvergentTrend,
    Inconclusive,
}

/// `I ~ a + b g(R)` fitted by least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub class: GrowthClass,
    pub a: f64,
    pub b: f64,
    /// Exponent for the power class.
    pub q: f64,
    /// Root mean square residual.
    pub rms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    pub best: Candidate,
    pub candidates: Vec<Candidate>,
    pub verdict: Verdict,
}

fn linear_fit(g: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = g.len() as f64;
    let (mg, my) = (g.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sgg: f64 = g.iter().map(|v| (v - mg) * (v - mg)).sum();
    let sgy: f64 = g.iter().zip(y).map(|(a, b)| (a - mg) * (b - my)).sum();
    let b = if sgg > 0.0 { sgy / sgg } else { 0.0 };
    let a = my - b * mg;
    let rss: f64 = g.iter().zip(y).map(|(gv, yv)| (yv - a - b * gv).powi(2)).sum();
    (a, b, (rss / n).sqrt())
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    linear_fit(x, y).1
}

/// Fits `{const, log R, log log R, R^q}` and picks a class.
///
/// The constant wins when the data vary by less than `1e-10` relative; the three-parameter
/// power class must halve the best two-parameter residual to be preferred.
pub fn fit_growth(radii: &[f64], values: &[f64]) -> GrowthFit {
    assert!(radii.len() == values.len() && radii.len() >= 3, "need at least three samples");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let const_rms = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let bounded = Candidate { class: GrowthClass::Bounded, a: mean, b: 0.0, q: 0.0, rms: const_rms };
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let (a, b, rms) = linear_fit(&logs, values);
    let log = Candidate { class: GrowthClass::Log, a, b, q: 0.0, rms };
    let loglogs: Vec<f64> = logs.iter().map(|l| if *l > 0.0 { l.ln() } else { f64::NAN }).collect();
    let loglog = if loglogs.iter().all(|v| v.is_finite()) {
        let (a, b, rms) = linear_fit(&loglogs, values);
        Candidate { class: GrowthClass::LogLog, a, b, q: 0.0, rms }
    } else {
        Candidate { class: GrowthClass::LogLog, a: f64::NAN, b: f64::NAN, q: 0.0, rms: f64::INFINITY }
    };
    // power exponents on [-8, 4] in steps of 1/40, skipping the log-like neighborhood of 0
    let mut power = Candidate { class: GrowthClass::Power, a: f64::NAN, b: f64::NAN, q: f64::NAN, rms: f64::INFINITY };
    let rmax = radii.iter().fold(0.0f64, |a, &r| a.max(r));
    for k in -320i32..=160 {
        if k.abs() < 2 {
            continue;
        }
        let q = k as f64 / 40.0;
        let g: Vec<f64> = radii.iter().map(|r| (r / rmax).powf(q)).collect();
        let (a, b, rms) = linear_fit(&g, values);
        if rms < power.rms {
            power = Candidate { class: GrowthClass::Power, a, b: b * rmax.powf(-q), q, rms };
        }
    }
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let spread = values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v)) - values.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let best = if spread <= 1e-10 * scale {
        bounded
    } else {
        let two = if loglog.rms < log.rms { loglog } else { log };
        if power.rms < 0.5 * two.rms {
            power
        } else {
            two
        }
    };
    let verdict = match best.class {
        GrowthClass::Bounded => Verdict::ConvergentTrend,
        _ if best.rms > 0.05 * spread => Verdict::Inconclusive,
        GrowthClass::Log | GrowthClass::LogLog if best.b > 0.0 => Verdict::DivergentTrend,
        GrowthClass::Power if best.q > 0.0 && best.b > 0.0 => Verdict::DivergentTrend,
        GrowthClass::Power if best.q < 0.0 => Verdict::ConvergentTrend,
        _ => Verdict::Inconclusive,
    };
    GrowthFit { best, candidates: vec![bounded, log, loglog, power], verdict }
}
