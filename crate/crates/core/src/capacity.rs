//! Sum capacity under weak interference, achievable rates and outer bounds.

use serde::Serialize;

use crate::model::{InputConfig, SnrSextet, WiCertificate};

const WI_GRID: usize = 4096;
const WI_BISECT_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub fn sum(&self) -> f64 {
        self.r1 + self.r2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    /// The formula is the sum capacity for this channel.
    Certified,
    /// Conditions for optimality are not met; the value is only the formula.
    FormulaOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumRate {
    pub value: f64,
    pub certification: Certification,
}

impl SumRate {
    pub fn certified(&self) -> bool {
        self.certification == Certification::Certified
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutSetBounds {
    /// Broadcast cut at the Tx1/relay side.
    pub r1_tx_side: f64,
    /// Multiple-access cut into Rx1.
    pub r1_rx_side: f64,
    pub r2_bound: f64,
}

impl CutSetBounds {
    pub fn sum(&self) -> f64 {
        self.r1_tx_side.min(self.r1_rx_side) + self.r2_bound
    }
}

/// The relay can decode everything Rx1 decodes.
pub fn relay_condition_holds(snr: &SnrSextet) -> bool {
    (snr.snr11 + snr.snr31) / (1.0 + snr.snr21) <= snr.snr13
}

/// Exact check of the two weak-interference inequalities.
pub fn wi_certificate_holds(snr: &SnrSextet, cert: &WiCertificate) -> bool {
    let WiCertificate { beta1, beta2 } = *cert;
    if !((0.0..=1.0).contains(&beta1) && (0.0..=1.0).contains(&beta2)) {
        return false;
    }
    let a = snr.snr32 * (1.0 + snr.snr21).powi(2)
        <= beta1 * (snr.snr31 * (1.0 - beta2) - 2.0 * snr.snr32 * snr.snr11);
    let b = snr.snr21 * (1.0 + snr.snr32).powi(2) <= beta2 * snr.snr22 * (1.0 - beta1);
    a && b
}

/// Interval of beta2 in [0, 1] satisfying both inequalities at this beta1.
/// Both are linear in beta2 once beta1 is fixed.
fn beta2_interval(snr: &SnrSextet, beta1: f64) -> Option<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;

    // beta1 snr31 beta2 <= beta1 (snr31 - 2 snr32 snr11) - snr32 (1 + snr21)^2
    let ka = beta1 * snr.snr31;
    let ra = beta1 * (snr.snr31 - 2.0 * snr.snr32 * snr.snr11) - snr.snr32 * (1.0 + snr.snr21).powi(2);
    if ka > 0.0 {
        hi = hi.min(ra / ka);
    } else if ra < 0.0 {
        return None;
    }

    // beta2 snr22 (1 - beta1) >= snr21 (1 + snr32)^2
    let kb = snr.snr22 * (1.0 - beta1);
    let rb = snr.snr21 * (1.0 + snr.snr32).powi(2);
    if kb > 0.0 {
        lo = lo.max(rb / kb);
    } else if rb > 0.0 {
        return None;
    }
    Some((lo, hi))
}

fn width(snr: &SnrSextet, beta1: f64) -> f64 {
    match beta2_interval(snr, beta1) {
        Some((lo, hi)) => hi - lo,
        None => f64::NEG_INFINITY,
    }
}

fn certify_at(snr: &SnrSextet, beta1: f64) -> Option<WiCertificate> {
    let (lo, hi) = beta2_interval(snr, beta1)?;
    if lo > hi {
        return None;
    }
    let cert = WiCertificate { beta1, beta2: 0.5 * (lo + hi) };
    wi_certificate_holds(snr, &cert).then_some(cert)
}

/// Searches for (beta1, beta2) meeting the weak-interference inequalities.
///
/// For fixed beta1 the admissible beta2 form an interval whose width is concave
/// in beta1. The width is scanned on an interior grid, the best bracket is refined
/// by bisection on the slope, and beta2 is taken at the interval midpoint. The
/// endpoints beta1 = 0 and 1 are tried last. Every returned pair re-verifies
/// against the raw inequalities.
pub fn wi_feasible(snr: &SnrSextet) -> Option<WiCertificate> {
    let h = 1.0 / WI_GRID as f64;
    let grid = |k: usize| (k as f64 + 0.5) * h;
    let mut best_k = 0;
    let mut best_w = f64::NEG_INFINITY;
    for k in 0..WI_GRID {
        let w = width(snr, grid(k));
        if w > best_w {
            best_w = w;
            best_k = k;
        }
    }
    if best_w.is_finite() {
        let mut a = if best_k == 0 { 0.5 * h } else { grid(best_k - 1) };
        let mut b = if best_k + 1 == WI_GRID { 1.0 - 0.5 * h } else { grid(best_k + 1) };
        for _ in 0..WI_BISECT_ITERS {
            let m = 0.5 * (a + b);
            let d = 1e-9 * (b - a).max(1e-300);
            if width(snr, m + d) > width(snr, m - d) {
                a = m;
            } else {
                b = m;
            }
        }
        let refined = 0.5 * (a + b);
        let pick = if width(snr, refined) >= best_w { refined } else { grid(best_k) };
        if let Some(c) = certify_at(snr, pick) {
            return Some(c);
        }
    }
    certify_at(snr, 0.0).or_else(|| certify_at(snr, 1.0))
}

pub fn zicr_sum_formula(snr: &SnrSextet) -> f64 {
    (1.0 + (snr.snr11 + snr.snr31) / (1.0 + snr.snr21)).log2() + (1.0 + snr.snr22 / (1.0 + snr.snr32)).log2()
}

/// Certified when the relay condition holds and a WI certificate exists.
pub fn sum_capacity_zicr(snr: &SnrSextet) -> SumRate {
    let ok = relay_condition_holds(snr) && wi_feasible(snr).is_some();
    SumRate {
        value: zicr_sum_formula(snr),
        certification: if ok { Certification::Certified } else { Certification::FormulaOnly },
    }
}

/// Z-IC without relay; treating interference as noise is optimal when snr21 <= snr22.
pub fn sum_capacity_zic(snr: &SnrSextet) -> SumRate {
    let value = (1.0 + snr.snr11 / (1.0 + snr.snr21)).log2() + (1.0 + snr.snr22).log2();
    SumRate {
        value,
        certification: if snr.snr21 <= snr.snr22 { Certification::Certified } else { Certification::FormulaOnly },
    }
}

/// Decode-and-forward rates with interference treated as noise, independent inputs.
pub fn achievable_rates(snr: &SnrSextet, inp: &InputConfig) -> RatePair {
    let mac = (1.0 + (inp.p1 * snr.snr11 + inp.p3 * snr.snr31) / (1.0 + inp.p2 * snr.snr21)).log2();
    let relay = (1.0 + inp.p1 * snr.snr13).log2();
    let r2 = (1.0 + inp.p2 * snr.snr22 / (1.0 + inp.p3 * snr.snr32)).log2();
    RatePair { r1: mac.min(relay), r2 }
}

pub fn genie_sum_upper_bound(snr: &SnrSextet) -> Bound {
    let SnrSextet { snr11, snr21, snr31, snr22, snr32, .. } = *snr;
    let cross = 2.0 * (snr11 * snr31).sqrt();
    let value = (1.0 + snr21 + (snr11 + snr31 + snr11 * snr32 + cross) / (1.0 + snr32)).log2()
        + (1.0 + snr32 + snr22 / (1.0 + snr21)).log2();
    Bound { value, valid: snr31 > snr32 * (snr11 * snr31).sqrt() }
}

pub fn cutset_bounds(snr: &SnrSextet) -> CutSetBounds {
    CutSetBounds {
        r1_tx_side: (1.0 + snr.snr11 + snr.snr13).log2(),
        r1_rx_side: (1.0 + snr.snr11 + snr.snr31).log2(),
        r2_bound: (1.0 + snr.snr22).log2(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sx(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> SnrSextet {
        SnrSextet::new(a, b, c, d, e, f).unwrap()
    }

    fn log_uniform(rng: &mut ChaCha8Rng) -> f64 {
        10f64.powf(rng.random_range(-3.0..3.0))
    }

    fn random_sextet(rng: &mut ChaCha8Rng) -> SnrSextet {
        sx(log_uniform(rng), log_uniform(rng), log_uniform(rng), log_uniform(rng), log_uniform(rng), log_uniform(rng))
    }

    #[test]
    fn relay_condition_examples() {
        // (1 + 1) / 1.01 = 1.980 <= 2
        assert!(relay_condition_holds(&sx(1.0, 0.01, 1.0, 1.0, 0.01, 2.0)));
        assert!(relay_condition_holds(&sx(1.0, 0.0, 1.0, 1.0, 0.0, 2.0)));
        assert!(!relay_condition_holds(&sx(1.0, 0.0, 1.0, 1.0, 0.0, 1.9)));
    }

    #[test]
    fn wi_examples() {
        let sym = SnrSextet::symmetric(1.0, 0.01, 1e6).unwrap();
        assert!(wi_certificate_holds(&sym, &WiCertificate { beta1: 0.5, beta2: 0.5 }));
        let c = wi_feasible(&sym).unwrap();
        assert!(wi_certificate_holds(&sym, &c));

        let free = sx(1.0, 0.0, 1.0, 1.0, 0.0, 1.0);
        assert!(wi_certificate_holds(&free, &WiCertificate { beta1: 0.0, beta2: 0.0 }));
        assert!(wi_feasible(&free).is_some());

        // 0.6 (1 + 0.01)^2 > beta1 (1 - beta2 - 1.2) for every beta
        assert!(wi_feasible(&sx(1.0, 0.01, 1.0, 1.0, 0.6, 1.0)).is_none());
    }

    #[test]
    fn wi_without_rx2_direct_link() {
        assert!(wi_feasible(&sx(1.0, 0.1, 1.0, 0.0, 0.01, 1.0)).is_none());
        assert!(wi_feasible(&sx(1.0, 0.0, 1.0, 0.0, 0.01, 1.0)).is_some());
    }

    #[test]
    fn wi_relay_off_matches_zic_condition() {
        assert!(wi_feasible(&sx(1.0, 0.5, 0.0, 1.0, 0.0, 1.0)).is_some());
        assert!(wi_feasible(&sx(1.0, 1.0, 0.0, 1.0, 0.0, 1.0)).is_some());
        assert!(wi_feasible(&sx(1.0, 1.5, 0.0, 1.0, 0.0, 1.0)).is_none());
    }

    #[test]
    fn sum_capacity_examples() {
        let s = sx(1.0, 0.01, 1.0, 1.0, 0.01, 1e6);
        let expect = (1.0 + 2.0 / 1.01f64).log2() + (1.0 + 1.0 / 1.01f64).log2();
        let c = sum_capacity_zicr(&s);
        assert!((c.value - expect).abs() < 1e-12);
        assert!((c.value - 2.5682).abs() < 1e-4);
        assert!(c.certified());

        let plain = sx(1.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        assert!((sum_capacity_zicr(&plain).value - 2.0).abs() < 1e-15);

        let zero_db = SnrSextet::symmetric(1.0, 1.0, 1e6).unwrap();
        assert!((sum_capacity_zicr(&zero_db).value - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn zic_examples() {
        let s = sx(1.0, 0.01, 0.0, 1.0, 0.0, 0.0);
        let z = sum_capacity_zic(&s);
        assert!((z.value - ((1.0 + 1.0 / 1.01f64).log2() + 1.0)).abs() < 1e-12);
        assert!((z.value - 1.9928).abs() < 1e-4);
        assert!(z.certified());
        assert_eq!(z.value, sum_capacity_zicr(&s).value);
        assert!(!sum_capacity_zic(&sx(1.0, 2.0, 0.0, 1.0, 0.0, 0.0)).certified());
    }

    #[test]
    fn bound_examples() {
        let s = sx(1.0, 0.0, 1.0, 1.0, 0.0, 1.0);
        let g = genie_sum_upper_bound(&s);
        assert!((g.value - (5f64.log2() + 1.0)).abs() < 1e-12);
        assert!(g.valid);
        let c = cutset_bounds(&sx(1.0, 0.0, 1.0, 1.0, 0.0, 3.0));
        assert!((c.r1_tx_side - 5f64.log2()).abs() < 1e-15);
        assert!((c.r1_rx_side - 3f64.log2()).abs() < 1e-15);
        assert!((c.r2_bound - 1.0).abs() < 1e-15);
    }

    #[test]
    fn achievable_at_full_power() {
        let s = sx(1.0, 0.01, 1.0, 1.0, 0.01, 1e6);
        let r = achievable_rates(&s, &InputConfig::full_power());
        assert!((r.sum() - zicr_sum_formula(&s)).abs() < 1e-12);
        let r = achievable_rates(&sx(1.0, 0.0, 1.0, 1.0, 0.0, 1.0), &InputConfig::full_power());
        assert!((r.r1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduction_to_zic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let s = random_sextet(&mut rng).without_relay();
            assert!((sum_capacity_zicr(&s).value - sum_capacity_zic(&s).value).abs() < 1e-12);
        }
    }

    #[test]
    fn feasibility_monotone_in_interference() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut checked = 0;
        for _ in 0..20_000 {
            let s = random_sextet(&mut rng);
            if wi_feasible(&s).is_none() {
                continue;
            }
            checked += 1;
            let f: f64 = rng.random_range(0.0..1.0);
            assert!(wi_feasible(&SnrSextet { snr21: s.snr21 * f, ..s }).is_some());
            assert!(wi_feasible(&SnrSextet { snr32: s.snr32 * f, ..s }).is_some());
        }
        assert!(checked > 50, "only {checked} feasible draws");
    }

    #[test]
    fn certificates_are_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let s = random_sextet(&mut rng);
            if let Some(c) = wi_feasible(&s) {
                assert!(wi_certificate_holds(&s, &c), "{s:?} {c:?}");
            }
        }
    }

    #[test]
    fn bounds_dominate_achievable() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10_000 {
            let s = random_sextet(&mut rng);
            let ach = achievable_rates(&s, &InputConfig::full_power());
            let g = genie_sum_upper_bound(&s);
            assert!(g.value >= ach.sum() - 1e-12);
            assert!(cutset_bounds(&s).sum() >= ach.sum() - 1e-12);
            let zicr = sum_capacity_zicr(&s);
            if zicr.certified() {
                assert!((zicr.value - ach.sum()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn relay_gain_over_zic() {
        let snr13 = 1e6;
        let diff = |db: f64| {
            let c = 10f64.powf(db / 10.0);
            let s = SnrSextet::symmetric(1.0, c, snr13).unwrap();
            sum_capacity_zicr(&s).value - sum_capacity_zic(&s.without_relay()).value
        };
        for db in [-20.0, -10.0, -3.0] {
            assert!(diff(db) > 0.0);
        }
        assert!(diff(0.0).abs() < 1e-12);
        assert!(diff(3.0) < 0.0);
        let s = SnrSextet::symmetric(1.0, 1e-6, snr13).unwrap();
        assert!((sum_capacity_zicr(&s).value - 3f64.log2() - 1.0).abs() < 1e-5);
        assert!((sum_capacity_zic(&s.without_relay()).value - 2.0).abs() < 1e-5);
    }
}
