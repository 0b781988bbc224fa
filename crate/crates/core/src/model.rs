//! Channel parameters, input and genie configurations, and phase sampling.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::tol;

pub type C64 = Complex<f64>;

/// Link SNRs. `snr31`/`snr32` are relay-to-receiver, `snr13` is source-to-relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrSextet {
    pub snr11: f64,
    pub snr21: f64,
    pub snr31: f64,
    pub snr22: f64,
    pub snr32: f64,
    pub snr13: f64,
}

impl SnrSextet {
    pub fn new(snr11: f64, snr21: f64, snr31: f64, snr22: f64, snr32: f64, snr13: f64) -> Result<Self> {
        let s = SnrSextet { snr11, snr21, snr31, snr22, snr32, snr13 };
        s.validate()?;
        Ok(s)
    }

    /// Direct links `snrd`, interfering links (21 and 32) `snrc`, relay-to-rx1 `snrd`.
    pub fn symmetric(snrd: f64, snrc: f64, snr13: f64) -> Result<Self> {
        Self::new(snrd, snrc, snrd, snrd, snrc, snr13)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if !v.is_finite() || v < 0.0 {
                return domain(format!("{name} = {v} must be finite and >= 0"));
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("snr11", self.snr11),
            ("snr21", self.snr21),
            ("snr31", self.snr31),
            ("snr22", self.snr22),
            ("snr32", self.snr32),
            ("snr13", self.snr13),
        ]
    }

    /// Same channel with the relay switched off (plain Z-IC).
    pub fn without_relay(&self) -> Self {
        SnrSextet { snr31: 0.0, snr32: 0.0, ..*self }
    }
}

/// GDoF exponents: snr21 = SNR^alpha, snr31 = SNR^beta, snr13 = SNR^gamma, snr32 = SNR^lambda.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdofExponents {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl GdofExponents {
    pub fn new(alpha: f64, beta: f64, gamma: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("lambda", lambda)] {
            if !v.is_finite() || v < 0.0 {
                return domain(format!("{name} = {v} must be finite and >= 0"));
            }
        }
        Ok(GdofExponents { alpha, beta, gamma, lambda })
    }
}

pub fn snr_from_exponents(exp: &GdofExponents, snr: f64) -> Result<SnrSextet> {
    if !snr.is_finite() || snr <= 0.0 {
        return domain(format!("snr = {snr} must be finite and > 0"));
    }
    SnrSextet::new(
        snr,
        snr.powf(exp.alpha),
        snr.powf(exp.beta),
        snr,
        snr.powf(exp.lambda),
        snr.powf(exp.gamma),
    )
}

/// Power fractions and the source/relay correlation `upsilon = E{X1 X3*}/sqrt(P1 P3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputConfig {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub upsilon: C64,
}

impl InputConfig {
    pub fn new(p1: f64, p2: f64, p3: f64, upsilon: C64) -> Result<Self> {
        for (name, v) in [("p1", p1), ("p2", p2), ("p3", p3)] {
            if !(0.0..=1.0).contains(&v) {
                return domain(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        if !(upsilon.norm() <= 1.0) {
            return domain(format!("|upsilon| = {} exceeds 1", upsilon.norm()));
        }
        Ok(InputConfig { p1, p2, p3, upsilon })
    }

    pub fn full_power() -> Self {
        InputConfig { p1: 1.0, p2: 1.0, p3: 1.0, upsilon: C64::new(0.0, 0.0) }
    }
}

/// Genie signals are S1 = H11 X1 + H31 X3 + eta1 W1 and S2 = H22 X2 + eta2 W2,
/// with E{W_k Z_k*} = vtilde_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenieParams {
    pub eta1: C64,
    pub eta2: C64,
    pub vtilde1: C64,
    pub vtilde2: C64,
}

impl GenieParams {
    pub fn new(eta1: C64, eta2: C64, vtilde1: C64, vtilde2: C64) -> Result<Self> {
        if !(vtilde1.norm() <= 1.0 && vtilde2.norm() <= 1.0) {
            return domain("genie noise correlations must have modulus <= 1");
        }
        if !(eta1.is_finite() && eta2.is_finite()) {
            return domain("genie gains must be finite");
        }
        Ok(GenieParams { eta1, eta2, vtilde1, vtilde2 })
    }

    /// Noise-free genie; handy when only the X/Y block is of interest.
    pub fn silent() -> Self {
        let z = C64::new(0.0, 0.0);
        GenieParams { eta1: z, eta2: z, vtilde1: z, vtilde2: z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WiCertificate {
    pub beta1: f64,
    pub beta2: f64,
}

/// Validated Hermitian positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCov {
    m: DMatrix<C64>,
}

impl HermitianCov {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return domain("covariance must be square");
        }
        let n = m.nrows();
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !scale.is_finite() {
            return domain("covariance has non-finite entries");
        }
        for i in 0..n {
            for j in 0..n {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > tol::HERMITIAN_REL * scale {
                    return domain(format!("covariance not Hermitian at ({i}, {j})"));
                }
            }
        }
        let h = hermitian_part(&m);
        if n > 0 {
            let ev = SymmetricEigen::new(h.clone()).eigenvalues;
            let top = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let low = ev.iter().cloned().fold(f64::INFINITY, f64::min);
            if low < -tol::PSD_REL * top {
                return domain(format!("covariance not PSD: eigenvalue {low:e} vs scale {top:e}"));
            }
        }
        Ok(HermitianCov { m: h })
    }

    /// `a * a^H`, PSD by construction.
    pub fn from_factor(a: &DMatrix<C64>) -> Result<Self> {
        Self::new(a * a.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn principal(&self, idx: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.m[(idx[i], idx[j])])
    }

    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.m[(rows[i], cols[j])])
    }
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// One channel phase per link, each in [0, 2pi).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelRealization {
    pub theta11: f64,
    pub theta21: f64,
    pub theta31: f64,
    pub theta22: f64,
    pub theta32: f64,
    pub theta13: f64,
}

impl ChannelRealization {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut t = || rng.random::<f64>() * 2.0 * PI;
        ChannelRealization {
            theta11: t(),
            theta21: t(),
            theta31: t(),
            theta22: t(),
            theta32: t(),
            theta13: t(),
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.theta11, self.theta21, self.theta31, self.theta22, self.theta32, self.theta13]
    }
}

pub fn sample_channel(seed: u64) -> ChannelRealization {
    ChannelRealization::sample(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `sqrt(snr) e^{j theta}`.
pub fn coefficient(snr: f64, theta: f64) -> C64 {
    C64::from_polar(snr.sqrt(), theta)
}
