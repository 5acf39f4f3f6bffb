//! Index arithmetic, smallness and local-time criteria, and the blowup monitor.

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lp::{fb_norm, DyadicPartition};
use crate::record::{cumulative_trapezoid, TrajectoryRecord};
use crate::solver::ModelParams;
use crate::spectral::SpectralField;

/// `β = n(1 − 1/p) − α + σ + 1`.
pub fn critical_index(n: usize, p: Exponent, alpha: f64, sigma: f64) -> f64 {
    n as f64 * (1.0 - p.recip()) - alpha + sigma + 1.0
}

/// Open interval for α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaRange {
    pub lower: f64,
    pub upper: f64,
}

impl AlphaRange {
    pub fn contains(&self, alpha: f64) -> bool {
        self.lower < alpha && alpha < self.upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub beta: f64,
    /// α lies in the range for the requested `r`.
    pub admissible: bool,
    pub admissible_range: AlphaRange,
    /// `2max{1,σ+1} < α < n(1−1/p)+σ+2`.
    pub admissible_r2: bool,
    pub range_r2: AlphaRange,
    /// The `r → ∞` limit `max{1,σ+1} < α < n(1−1/p)+σ+2`.
    pub admissible_improved: bool,
    pub range_improved: AlphaRange,
    pub rationale: String,
    pub r_used: Exponent,
}

/// Range `r′max{1,σ+1} < α < n(1−1/p)+σ+2`.
pub fn alpha_range(n: usize, p: Exponent, sigma: f64, r: Exponent) -> AlphaRange {
    AlphaRange {
        lower: r.conjugate().value() * f64::max(1.0, sigma + 1.0),
        upper: n as f64 * (1.0 - p.recip()) + sigma + 2.0,
    }
}

pub fn admissible(n: usize, p: Exponent, alpha: f64, sigma: f64, r: Exponent) -> IndexReport {
    let range = alpha_range(n, p, sigma, r);
    let range_r2 = alpha_range(n, p, sigma, Exponent::TWO);
    let range_improved = alpha_range(n, p, sigma, Exponent::INFINITY);
    let ok = range.contains(alpha);
    let rationale = if ok {
        format!("{} < alpha < {}", range.lower, range.upper)
    } else if alpha <= range.lower {
        if sigma + 1.0 > 1.0 {
            format!("lower bound r'(sigma+1) = {} binds", range.lower)
        } else {
            format!("lower bound r' = {} binds", range.lower)
        }
    } else {
        format!("upper bound n(1-1/p)+sigma+2 = {} binds", range.upper)
    };
    IndexReport {
        beta: critical_index(n, p, alpha, sigma),
        admissible: ok,
        admissible_range: range,
        admissible_r2: range_r2.contains(alpha),
        range_r2,
        admissible_improved: range_improved.contains(alpha),
        range_improved,
        rationale,
        r_used: r,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smallness {
    pub pass: bool,
    /// `‖u0‖_{FB^β}`.
    pub norm: f64,
    /// `1/(4C²)`.
    pub threshold: f64,
    /// `threshold / norm`; infinite for zero data.
    pub margin: f64,
}

/// `‖u0‖_{FB^β_{p,q}} ≤ 1/(4C²)`.
pub fn smallness_check(
    u0: &SpectralField,
    params: &ModelParams,
    c_fit: f64,
    partition: &DyadicPartition,
) -> Result<Smallness> {
    if !(c_fit > 0.0 && c_fit.is_finite()) {
        return Err(Error::Parameter(format!("fitted constant must be positive, got {c_fit}")));
    }
    let norm = fb_norm(u0, params.data_norm(), partition);
    let threshold = 1.0 / (4.0 * c_fit * c_fit);
    let margin = if norm == 0.0 { f64::INFINITY } else { threshold / norm };
    Ok(Smallness { pass: norm <= threshold, norm, threshold, margin })
}

/// Sharp split into `|ξ| ≤ λ` and `|ξ| > λ`.
pub fn split_frequency(u0: &SpectralField, lambda: f64) -> Result<(SpectralField, SpectralField)> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("split frequency must be positive, got {lambda}")));
    }
    let norms = u0.grid.xi_norms();
    let low = u0.map_multiplier(|f| if norms[f] <= lambda { 1.0 } else { 0.0 });
    let high = u0.map_multiplier(|f| if norms[f] <= lambda { 0.0 } else { 1.0 });
    Ok((low, high))
}

/// Smallest lattice radius `λ ≥ dxi` with `‖high‖_{FB^β} ≤ 1/(8C)`.
pub fn select_lambda(u0: &SpectralField, params: &ModelParams, c_fit: f64, partition: &DyadicPartition) -> Result<f64> {
    if !(c_fit > 0.0) {
        return Err(Error::Parameter("fitted constant must be positive".into()));
    }
    let target = 1.0 / (8.0 * c_fit);
    let mut radii: Vec<f64> = u0.grid.xi_norms().into_iter().filter(|&r| r > 0.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);
    let high_norm = |lambda: f64| -> Result<f64> {
        let (_, high) = split_frequency(u0, lambda)?;
        Ok(fb_norm(&high, params.data_norm(), partition))
    };
    // the high part shrinks as λ grows, so bisect over the sorted radii
    let (mut lo, mut hi) = (0usize, radii.len() - 1);
    if high_norm(radii[lo])? <= target {
        return Ok(radii[lo]);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if high_norm(radii[mid])? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(radii[hi])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTime {
    /// `(1/(8C²λ^{α/2}‖u0‖))²`.
    pub two: f64,
    /// `min{(1/(16C²λ^{α/r}‖u0‖))^r, (1/(16C²λ^{α/r′}‖u0‖))^{r′}}`.
    pub general: f64,
}

pub fn local_time_bound(u0_norm: f64, lambda: f64, alpha: f64, c_fit: f64, r: Exponent) -> Result<LocalTime> {
    if !(lambda > 0.0 && alpha > 0.0 && c_fit > 0.0 && u0_norm >= 0.0) {
        return Err(Error::Parameter("local time bound needs lambda, alpha, C > 0 and a norm >= 0".into()));
    }
    if u0_norm == 0.0 {
        return Ok(LocalTime { two: f64::INFINITY, general: f64::INFINITY });
    }
    let c2 = c_fit * c_fit;
    let two = (1.0 / (8.0 * c2 * lambda.powf(alpha / 2.0) * u0_norm)).powi(2);
    let term = |s: Exponent| {
        if s.is_infinite() {
            let base = 1.0 / (16.0 * c2 * u0_norm);
            if base >= 1.0 { f64::INFINITY } else { 0.0 }
        } else {
            (1.0 / (16.0 * c2 * lambda.powf(alpha * s.recip()) * u0_norm)).powf(s.value())
        }
    };
    Ok(LocalTime { two, general: term(r).min(term(r.conjugate())) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorStatus {
    Bounded,
    Growing,
    Blown,
}

impl MonitorStatus {
    pub fn label(self) -> &'static str {
        match self {
            MonitorStatus::Bounded => "bounded",
            MonitorStatus::Growing => "growing",
            MonitorStatus::Blown => "blown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonitorReport {
    pub status: MonitorStatus,
    /// Running `∫_0^t ‖u‖_{FB^{β+α}} dτ` at each sample.
    pub integral: Vec<f64>,
}

impl MonitorReport {
    pub fn total(&self) -> f64 {
        self.integral.last().copied().unwrap_or(0.0)
    }
}

/// Recomputes the running integral from the block norms and classifies the tail:
/// growing when the integral's slope strictly increases over the last three sample windows.
pub fn blowup_monitor(rec: &TrajectoryRecord, params: &ModelParams, solver_blown: bool) -> Result<MonitorReport> {
    let series = rec.fb_series(params.smoothing_norm())?;
    let integral = cumulative_trapezoid(&rec.times, &series);
    let status = if solver_blown {
        MonitorStatus::Blown
    } else {
        let k = integral.len();
        let growing = k >= 4 && {
            let slope = |i: usize| (integral[i + 1] - integral[i]) / (rec.times[i + 1] - rec.times[i]);
            slope(k - 4) < slope(k - 3) && slope(k - 3) < slope(k - 2)
        };
        if growing { MonitorStatus::Growing } else { MonitorStatus::Bounded }
    };
    Ok(MonitorReport { status, integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::lp::build_partition;
    use crate::pressure::PressureSpec;
    use num_complex::Complex64;

    fn e(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn critical_index_examples() {
        assert_eq!(critical_index(2, Exponent::TWO, 2.0, 0.0), 0.0);
        assert_eq!(critical_index(3, Exponent::INFINITY, 2.0, -1.0), 1.0);
        let (n, p, a, s) = (2, e(3.0), 1.7, 0.4);
        assert!((critical_index(n, p, a, s) + a - (n as f64 * (1.0 - 1.0 / 3.0) + s + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn admissible_examples() {
        let rep = admissible(3, Exponent::INFINITY, 2.0, 0.0, Exponent::INFINITY);
        assert!(rep.admissible && rep.admissible_improved);
        assert_eq!(rep.range_improved, AlphaRange { lower: 1.0, upper: 5.0 });
        assert!(!rep.admissible_r2);
        assert_eq!(rep.range_r2.lower, 2.0);
        let rep = admissible(2, Exponent::TWO, 1.5, -1.0, Exponent::INFINITY);
        assert_eq!(rep.range_improved, AlphaRange { lower: 1.0, upper: 2.0 });
        assert!(rep.admissible);
        assert!(!admissible(2, Exponent::TWO, 2.5, -1.0, Exponent::TWO).admissible);
    }

    #[test]
    fn local_time_examples() {
        let t = local_time_bound(1.0, 2.0, 2.0, 1.0, Exponent::TWO).unwrap();
        assert!((t.two - 1.0 / 256.0).abs() < 1e-18);
        let t2 = local_time_bound(2.0, 2.0, 2.0, 1.0, Exponent::TWO).unwrap();
        assert!((t2.two - t.two / 4.0).abs() < 1e-18);
        assert!((t.general - (1.0f64 / 32.0).powi(2)).abs() < 1e-18);
        assert_eq!(local_time_bound(0.0, 2.0, 2.0, 1.0, Exponent::TWO).unwrap().two, f64::INFINITY);
        assert!(local_time_bound(1.0, 0.0, 2.0, 1.0, Exponent::TWO).is_err());
    }

    #[test]
    fn split_and_lambda() {
        let g = GridSpec::new(1, 64, 4.0 * std::f64::consts::PI / 3.0).unwrap();
        let part = build_partition(&g).unwrap();
        let u = SpectralField::from_symbol(g, |xi| Complex64::new((-xi[0] * xi[0] / 4.0).exp(), 0.0));
        let (low, high) = split_frequency(&u, 1e3).unwrap();
        assert_eq!(high.coeff_max(), 0.0);
        assert_eq!(low, u);
        let (low, high) = split_frequency(&u, 1e-6).unwrap();
        assert_eq!(low.coeffs.iter().filter(|c| c.norm() > 0.0).count(), 1);
        assert_eq!(low.add(&high), u);
        assert!(split_frequency(&u, 0.0).is_err());

        let params = ModelParams::new(2.0, PressureSpec::riesz(0.5).unwrap(), 1, Exponent::TWO, Exponent::TWO).unwrap();
        let mut prev = f64::INFINITY;
        for lam in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let h = fb_norm(&split_frequency(&u, lam).unwrap().1, params.data_norm(), &part);
            assert!(h <= prev);
            prev = h;
        }
        let c = 2.0;
        let lam = select_lambda(&u, &params, c, &part).unwrap();
        let ok = |l: f64| fb_norm(&split_frequency(&u, l).unwrap().1, params.data_norm(), &part) <= 1.0 / (8.0 * c);
        assert!(ok(lam));
        assert!(lam <= g.dxi() * 1.0001 || !ok(lam - g.dxi()));
    }

    #[test]
    fn smallness_homogeneity() {
        let g = GridSpec::new(1, 64, 4.0 * std::f64::consts::PI / 3.0).unwrap();
        let part = build_partition(&g).unwrap();
        let params = ModelParams::new(2.0, PressureSpec::riesz(0.5).unwrap(), 1, Exponent::TWO, Exponent::TWO).unwrap();
        let zero = smallness_check(&SpectralField::zeros(g), &params, 1.0, &part).unwrap();
        assert!(zero.pass && zero.margin.is_infinite());
        let u = SpectralField::from_symbol(g, |xi| Complex64::new((-xi[0] * xi[0]).exp(), 0.0));
        let c_fit = 1.3;
        let base = smallness_check(&u, &params, c_fit, &part).unwrap();
        let c_star = 1.0 / (4.0 * c_fit * c_fit * base.norm);
        assert!(smallness_check(&u.scaled(c_star * 0.999), &params, c_fit, &part).unwrap().pass);
        assert!(!smallness_check(&u.scaled(c_star * 1.001), &params, c_fit, &part).unwrap().pass);
    }
}
