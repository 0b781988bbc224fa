//! Generalized degrees of freedom: inner/outer bounds and the region where they meet.

use serde::Serialize;

use crate::model::GdofExponents;

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Outer bound split into its two legs. `value` is what the bound certifies:
/// the full expression when the genie leg is valid, otherwise the cut-set leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GdofUpper {
    pub value: f64,
    pub valid: bool,
    pub cutset_leg: f64,
    pub genie_leg: f64,
}

impl GdofUpper {
    /// min of both legs regardless of validity.
    pub fn formula(&self) -> f64 {
        self.cutset_leg.min(self.genie_leg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GdofReport {
    pub lower: f64,
    pub upper: Option<f64>,
    pub upper_valid: bool,
    pub upper_formula: f64,
    pub max_certified: Option<f64>,
    pub conditions_hold: bool,
}

pub fn gdof_lower(e: &GdofExponents) -> f64 {
    e.gamma.min(pos(1.0 - e.alpha).max(pos(e.beta - e.alpha))) + pos(1.0 - e.lambda)
}

pub fn gdof_upper(e: &GdofExponents) -> GdofUpper {
    let GdofExponents { alpha, beta, gamma, lambda } = *e;
    let cutset_leg = 2f64.max(1.0 + beta.min(gamma));
    let genie_leg = (alpha + lambda).max(beta).max(1.0 + beta - alpha - lambda);
    let valid = beta > 2.0 * lambda + 1.0;
    GdofUpper {
        value: if valid { cutset_leg.min(genie_leg) } else { cutset_leg },
        valid,
        cutset_leg,
        genie_leg,
    }
}

pub fn gdof_max_conditions(e: &GdofExponents) -> bool {
    e.lambda == e.alpha && e.alpha <= 0.5 && 1.0 + 2.0 * e.alpha < e.beta && e.beta <= e.gamma + e.alpha
}

pub fn gdof_max(e: &GdofExponents) -> Option<f64> {
    gdof_max_conditions(e).then(|| 1.0 + e.beta - 2.0 * e.alpha)
}

/// Z-IC without relay.
pub fn gdof_zic_upper() -> f64 {
    2.0
}

pub fn gdof_report(e: &GdofExponents) -> GdofReport {
    let up = gdof_upper(e);
    GdofReport {
        lower: gdof_lower(e),
        upper: Some(up.value),
        upper_valid: up.valid,
        upper_formula: up.formula(),
        max_certified: gdof_max(e),
        conditions_hold: gdof_max_conditions(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub lower: f64,
    pub upper: GdofUpper,
    pub zic_bound: f64,
    pub max_certified: Option<f64>,
}

/// Sweeps alpha = lambda over [0, 1].
pub fn sweep_alpha(beta: f64, gamma: f64, n_points: usize) -> crate::Result<Vec<SweepRow>> {
    if n_points < 2 {
        return crate::error::domain("sweep needs at least 2 points");
    }
    (0..n_points)
        .map(|k| {
            let alpha = k as f64 / (n_points - 1) as f64;
            let e = GdofExponents::new(alpha, beta, gamma, alpha)?;
            Ok(SweepRow {
                alpha,
                lower: gdof_lower(&e),
                upper: gdof_upper(&e),
                zic_bound: gdof_zic_upper(),
                max_certified: gdof_max(&e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ex(a: f64, b: f64, g: f64, l: f64) -> GdofExponents {
        GdofExponents::new(a, b, g, l).unwrap()
    }

    #[test]
    fn lower_examples() {
        assert!((gdof_lower(&ex(0.3, 2.0, 2.0, 0.3)) - 2.4).abs() < 1e-12);
        assert_eq!(gdof_lower(&ex(0.0, 0.0, 0.0, 0.0)), 1.0);
        assert_eq!(gdof_lower(&ex(0.0, 1.0, 1.0, 0.0)), 2.0);
        assert!((gdof_lower(&ex(0.2, 2.0, 2.0, 0.2)) - 2.6).abs() < 1e-12);
        assert_eq!(gdof_lower(&ex(0.5, 2.0, 2.0, 0.5)), 2.0);
    }

    #[test]
    fn upper_examples() {
        let u = gdof_upper(&ex(0.3, 2.0, 2.0, 0.3));
        assert!(u.valid);
        assert!((u.value - 2.4).abs() < 1e-12);

        let u = gdof_upper(&ex(0.0, 1.0, 1.0, 0.0));
        assert!(!u.valid);
        assert_eq!(u.value, 2.0);

        let u = gdof_upper(&ex(0.5, 2.0, 2.0, 0.5));
        assert!(!u.valid);
        assert_eq!(u.value, 3.0);
        assert_eq!(u.formula(), 2.0);
    }

    #[test]
    fn max_examples() {
        assert!((gdof_max(&ex(0.3, 2.0, 2.0, 0.3)).unwrap() - 2.4).abs() < 1e-12);
        assert_eq!(gdof_max(&ex(0.5, 2.0, 2.0, 0.5)), None);
        assert_eq!(gdof_max(&ex(0.0, 2.0, 2.0, 0.0)), Some(3.0));
        assert_eq!(gdof_zic_upper(), 2.0);
    }

    #[test]
    fn sweep_examples() {
        let rows = sweep_alpha(2.0, 2.0, 11).unwrap();
        assert_eq!(rows[0].lower, 3.0);
        assert_eq!(rows[0].upper.value, 3.0);
        assert_eq!(rows[10].lower, 1.0);
        let rows = sweep_alpha(1.2, 1.2, 11).unwrap();
        assert!((rows[1].lower - 2.0).abs() < 1e-12);
        assert!(sweep_alpha(2.0, 2.0, 1).is_err());
    }

    #[test]
    fn sandwich_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let e = ex(
                rng.random_range(0.0..1.2),
                rng.random_range(0.0..3.0),
                rng.random_range(0.0..3.0),
                rng.random_range(0.0..1.2),
            );
            let u = gdof_upper(&e);
            assert!(gdof_lower(&e) <= u.value + 1e-12, "{e:?}");
            if let Some(m) = gdof_max(&e) {
                assert!((m - gdof_lower(&e)).abs() < 1e-12);
                assert!((m - u.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn piecewise_linear_slopes() {
        let h = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut kinks = 0;
        for _ in 0..10_000 {
            let (a, b, g, l) = (
                rng.random_range(0.0..1.2),
                rng.random_range(0.0..3.0),
                rng.random_range(0.0..3.0),
                rng.random_range(0.0..1.2),
            );
            let base = gdof_lower(&ex(a, b, g, l));
            for d in [
                gdof_lower(&ex(a + h, b, g, l)),
                gdof_lower(&ex(a, b + h, g, l)),
                gdof_lower(&ex(a, b, g + h, l)),
                gdof_lower(&ex(a, b, g, l + h)),
            ] {
                // every linear piece has slope -1, 0 or 1 in each exponent
                let slope = (d - base) / h;
                let snapped = slope.round();
                assert!(slope.abs() <= 1.0 + 1e-6);
                if (slope - snapped).abs() > 1e-6 {
                    kinks += 1;
                }
            }
        }
        // a fractional difference only appears when a kink falls inside the step
        assert!(kinks < 100, "{kinks} fractional slopes");
    }

    #[test]
    fn relay_beats_zic_below_half() {
        for k in 0..50 {
            let a = 0.5 * k as f64 / 50.0;
            assert!(gdof_max(&ex(a, 2.0, 2.0, a)).unwrap() > gdof_zic_upper());
        }
    }
}
