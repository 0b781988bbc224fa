//! Jointly Gaussian bookkeeping: covariances of the channel variables,
//! log-det entropies and conditional mutual information.

use std::f64::consts::{E, PI};

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::model::{
    coefficient, hermitian_part, ChannelRealization, GenieParams, HermitianCov, InputConfig, SnrSextet,
    WiCertificate, C64,
};
use crate::tol;

/// Quadrature points for averaging over the source/relay phase offset.
pub const PHASE_POINTS: usize = 512;

/// Channel variables in the order used by [`build_joint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    X3,
    Y1,
    Y2,
    Y3,
    S1,
    S2,
}

pub const LABELS: [&str; 8] = ["X1", "X2", "X3", "Y1", "Y2", "Y3", "S1", "S2"];

// latent sources: X1 X2 X3 Z1 Z2 Z3 W1 W2
const NSRC: usize = 8;
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Every channel variable as a linear map of independent-ish latent sources.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    sigma: [[C64; NSRC]; NSRC],
    rows: [[C64; NSRC]; 8],
}

impl ChannelModel {
    pub fn new(snr: &SnrSextet, inp: &InputConfig, genie: &GenieParams, ph: &ChannelRealization) -> Result<Self> {
        snr.validate()?;
        InputConfig::new(inp.p1, inp.p2, inp.p3, inp.upsilon)?;
        GenieParams::new(genie.eta1, genie.eta2, genie.vtilde1, genie.vtilde2)?;

        let mut sigma = [[ZERO; NSRC]; NSRC];
        sigma[0][0] = C64::from(inp.p1);
        sigma[1][1] = C64::from(inp.p2);
        sigma[2][2] = C64::from(inp.p3);
        sigma[0][2] = inp.upsilon * (inp.p1 * inp.p3).sqrt();
        sigma[2][0] = sigma[0][2].conj();
        for k in 3..NSRC {
            sigma[k][k] = ONE;
        }
        // E{W_k Z_k*} = vtilde_k
        sigma[6][3] = genie.vtilde1;
        sigma[3][6] = genie.vtilde1.conj();
        sigma[7][4] = genie.vtilde2;
        sigma[4][7] = genie.vtilde2.conj();

        let h11 = coefficient(snr.snr11, ph.theta11);
        let h21 = coefficient(snr.snr21, ph.theta21);
        let h31 = coefficient(snr.snr31, ph.theta31);
        let h22 = coefficient(snr.snr22, ph.theta22);
        let h32 = coefficient(snr.snr32, ph.theta32);
        let h13 = coefficient(snr.snr13, ph.theta13);

        let mut rows = [[ZERO; NSRC]; 8];
        rows[0][0] = ONE;
        rows[1][1] = ONE;
        rows[2][2] = ONE;
        rows[3] = [h11, h21, h31, ONE, ZERO, ZERO, ZERO, ZERO];
        rows[4] = [ZERO, h22, h32, ZERO, ONE, ZERO, ZERO, ZERO];
        rows[5] = [h13, ZERO, ZERO, ZERO, ZERO, ONE, ZERO, ZERO];
        rows[6] = [h11, ZERO, h31, ZERO, ZERO, ZERO, genie.eta1, ZERO];
        rows[7] = [ZERO, h22, ZERO, ZERO, ZERO, ZERO, ZERO, genie.eta2];
        Ok(ChannelModel { sigma, rows })
    }

    /// E{a b*}.
    pub fn cov(&self, a: Var, b: Var) -> C64 {
        let (ra, rb) = (&self.rows[a as usize], &self.rows[b as usize]);
        let mut acc = ZERO;
        for i in 0..NSRC {
            if ra[i] == ZERO {
                continue;
            }
            for j in 0..NSRC {
                if rb[j] == ZERO || self.sigma[i][j] == ZERO {
                    continue;
                }
                acc += ra[i] * self.sigma[i][j] * rb[j].conj();
            }
        }
        acc
    }

    /// var(y | s) for scalar y, s. Falls back to var(y) when s is deterministic.
    pub fn conditional_variance(&self, y: Var, s: Var) -> f64 {
        let vy = self.cov(y, y).re;
        let vs = self.cov(s, s).re;
        if vs <= 0.0 {
            return vy;
        }
        vy - self.cov(y, s).norm_sqr() / vs
    }

    pub fn covariance(&self) -> DMatrix<C64> {
        let all = [Var::X1, Var::X2, Var::X3, Var::Y1, Var::Y2, Var::Y3, Var::S1, Var::S2];
        DMatrix::from_fn(8, 8, |i, j| self.cov(all[i], all[j]))
    }
}

#[derive(Debug, Clone)]
pub struct JointGaussian {
    pub cov: HermitianCov,
    pub labels: Vec<String>,
}

impl JointGaussian {
    pub fn new(cov: HermitianCov, labels: Vec<String>) -> Result<Self> {
        if labels.len() != cov.dim() {
            return domain(format!("{} labels for a {}-dim covariance", labels.len(), cov.dim()));
        }
        Ok(JointGaussian { cov, labels })
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Domain(format!("unknown variable {label}")))
    }

    pub fn indices(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index(l)).collect()
    }
}

/// Covariance of (X1, X2, X3, Y1, Y2, Y3, S1, S2).
pub fn build_joint(
    snr: &SnrSextet,
    inp: &InputConfig,
    genie: &GenieParams,
    phases: &ChannelRealization,
) -> Result<JointGaussian> {
    let m = ChannelModel::new(snr, inp, genie, phases)?;
    let cov = HermitianCov::new(m.covariance())?;
    JointGaussian::new(cov, LABELS.iter().map(|s| s.to_string()).collect())
}

/// log2 det of a block if it is positive definite relative to `scale`.
fn pd_logdet(m: &DMatrix<C64>, scale: f64) -> Option<f64> {
    let n = m.nrows();
    if n == 0 {
        return Some(0.0);
    }
    if n == 1 {
        let v = m[(0, 0)].re;
        return (v > tol::PD_REL * scale.max(v) && v > 0.0).then(|| v.log2());
    }
    let h = hermitian_part(m);
    let ev = SymmetricEigen::new(h.clone()).eigenvalues;
    let top = ev.iter().cloned().fold(0.0f64, f64::max);
    let low = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(top > 0.0 && low > tol::PD_REL * top.max(scale)) {
        return None;
    }
    let l = Cholesky::new(h)?.unpack();
    Some(2.0 * (0..n).map(|i| l[(i, i)].re.log2()).sum::<f64>())
}

fn max_diag(m: &DMatrix<C64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).fold(0.0, f64::max)
}

/// K_tt - K_tg K_gg^+ K_gt. The pseudo-inverse drops directions of `given`
/// that are deterministic.
fn schur(k: &HermitianCov, target: &[usize], given: &[usize]) -> DMatrix<C64> {
    let ktt = k.principal(target);
    if given.is_empty() || target.is_empty() {
        return ktt;
    }
    let kgg = k.principal(given);
    let ktg = k.block(target, given);
    let eig = SymmetricEigen::new(kgg);
    let top = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    if top <= 0.0 {
        return ktt;
    }
    let all_pd = eig.eigenvalues.iter().all(|&l| l > tol::PD_REL * top);
    let corr = if all_pd {
        let ch = Cholesky::new(k.principal(given)).expect("checked positive definite");
        &ktg * ch.solve(&ktg.adjoint())
    } else {
        let v = &eig.eigenvectors;
        let inv = DMatrix::from_fn(given.len(), given.len(), |i, j| {
            if i == j && eig.eigenvalues[i] > tol::PD_REL * top {
                C64::from(1.0 / eig.eigenvalues[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let proj = &ktg * v;
        &proj * inv * proj.adjoint()
    };
    hermitian_part(&(ktt - corr))
}

fn entropy_of(m: &DMatrix<C64>, scale: f64, what: &str) -> Result<f64> {
    let n = m.nrows() as f64;
    pd_logdet(m, scale)
        .map(|ld| n * (PI * E).log2() + ld)
        .ok_or_else(|| Error::DegenerateEntropy(format!("{what} is singular")))
}

/// h = log2 det(pi e K) for the named subset.
pub fn logdet_entropy(jg: &JointGaussian, subset: &[&str]) -> Result<f64> {
    let idx = jg.indices(subset)?;
    let k = jg.cov.principal(&idx);
    entropy_of(&k, max_diag(&k), &format!("{subset:?}"))
}

/// h(target | given).
pub fn conditional_entropy(jg: &JointGaussian, target: &[&str], given: &[&str]) -> Result<f64> {
    let t = jg.indices(target)?;
    let g = jg.indices(given)?;
    let scale = max_diag(&jg.cov.principal(&t));
    entropy_of(&schur(&jg.cov, &t, &g), scale, &format!("{target:?} | {given:?}"))
}

/// I(A; B | C) = h(A|C) + h(B|C) - h(A,B|C), clamped at 0 within roundoff.
///
/// When A or B has deterministic directions given C the one-sided form
/// h(B|C) - h(B|A,C) is used instead; it is the same quantity.
pub fn conditional_mi(jg: &JointGaussian, a: &[&str], b: &[&str], given: &[&str]) -> Result<f64> {
    let ia = jg.indices(a)?;
    let ib = jg.indices(b)?;
    let ic = jg.indices(given)?;
    let k = &jg.cov;
    let mut iab = ia.clone();
    iab.extend(&ib);
    let sab = schur(k, &iab, &ic);
    let na = ia.len();
    let nb = ib.len();
    let scale_a = max_diag(&k.principal(&ia));
    let scale_b = max_diag(&k.principal(&ib));
    let scale_ab = scale_a.max(scale_b);

    let sub = |m: &DMatrix<C64>, off: usize, n: usize| m.view((off, off), (n, n)).into_owned();
    let raw = if let Some(lab) = pd_logdet(&sab, scale_ab) {
        let la = pd_logdet(&sub(&sab, 0, na), scale_a);
        let lb = pd_logdet(&sub(&sab, na, nb), scale_b);
        match (la, lb) {
            (Some(la), Some(lb)) => la + lb - lab,
            _ => return Err(Error::DegenerateEntropy("inconsistent conditional blocks".into())),
        }
    } else {
        let one_sided = |x: &[usize], y: &[usize], scale: f64| -> Option<Result<f64>> {
            let hx = pd_logdet(&schur(k, x, &ic), scale)?;
            let mut yc = y.to_vec();
            yc.extend(&ic);
            Some(
                pd_logdet(&schur(k, x, &yc), scale)
                    .map(|hxy| hx - hxy)
                    .ok_or_else(|| Error::DegenerateEntropy("one variable set determines the other".into())),
            )
        };
        match one_sided(&ib, &ia, scale_b).or_else(|| one_sided(&ia, &ib, scale_a)) {
            Some(r) => r?,
            None => return Err(Error::DegenerateEntropy(format!("{a:?} and {b:?} both singular given {given:?}"))),
        }
    };
    if raw >= 0.0 {
        Ok(raw)
    } else if raw >= -tol::MI_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::Consistency(format!("negative mutual information {raw:e}")))
    }
}

/// Genie from a WI certificate: real vtilde_k = sqrt(beta_k) with
/// eta1 vtilde1 = 1 + snr21 and eta2 vtilde2 = 1 + snr32.
pub fn make_genie(snr: &SnrSextet, cert: &WiCertificate) -> Result<GenieParams> {
    if !(cert.beta1 > 0.0) || !(cert.beta2 > 0.0) {
        return Err(Error::GenieDegenerate(format!(
            "beta1 = {}, beta2 = {} (snr21 = {}, snr32 = {})",
            cert.beta1, cert.beta2, snr.snr21, snr.snr32
        )));
    }
    if cert.beta1 > 1.0 || cert.beta2 > 1.0 {
        return domain("certificate entries must lie in [0, 1]");
    }
    let v1 = cert.beta1.sqrt();
    let v2 = cert.beta2.sqrt();
    let g = GenieParams::new(
        C64::from((1.0 + snr.snr21) / v1),
        C64::from((1.0 + snr.snr32) / v2),
        C64::from(v1),
        C64::from(v2),
    )?;
    let le = |lhs: f64, rhs: f64| lhs <= rhs + tol::GENIE_REL * lhs.abs().max(rhs.abs()).max(1.0);
    let first = le(
        snr.snr32 * g.eta1.norm_sqr(),
        snr.snr31 * (1.0 - g.vtilde2.norm_sqr()) - 2.0 * snr.snr32 * snr.snr11,
    );
    let second = le(snr.snr21 * g.eta2.norm_sqr(), snr.snr22 * (1.0 - g.vtilde1.norm_sqr()));
    if !(first && second) {
        return Err(Error::Consistency("certificate does not satisfy the genie inequalities".into()));
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogdetRates {
    /// I(X1, X3; Y1)
    pub rx1: f64,
    /// I(X2; Y2)
    pub rx2: f64,
    /// I(X1; Y3 | X3)
    pub relay: f64,
}

pub fn logdet_rates(snr: &SnrSextet, inp: &InputConfig, phases: &ChannelRealization) -> Result<LogdetRates> {
    let jg = build_joint(snr, inp, &GenieParams::silent(), phases)?;
    Ok(LogdetRates {
        rx1: conditional_mi(&jg, &["X1", "X3"], &["Y1"], &[])?,
        rx2: conditional_mi(&jg, &["X2"], &["Y2"], &[])?,
        relay: conditional_mi(&jg, &["X1"], &["Y3"], &["X3"])?,
    })
}

/// Mean of `f` over `n` equispaced phases in [0, 2pi) (trapezoid rule for a periodic integrand).
pub fn periodic_mean<F: FnMut(f64) -> Result<f64>>(n: usize, mut f: F) -> Result<f64> {
    let mut acc = 0.0;
    for k in 0..n {
        acc += f(2.0 * PI * k as f64 / n as f64)?;
    }
    Ok(acc / n as f64)
}

/// Phases putting the source/relay offset arg(h11 h31* upsilon) at `theta1`.
pub fn phases_for_offset(theta1: f64, upsilon: C64) -> ChannelRealization {
    ChannelRealization { theta11: theta1 - upsilon.arg(), ..Default::default() }
}

/// I(X1, X3; Y1) + I(X2; Y2), averaged over the phase offset when upsilon != 0.
pub fn sum_rate_via_logdet(snr: &SnrSextet, inp: &InputConfig) -> Result<f64> {
    if inp.upsilon.norm() == 0.0 {
        let r = logdet_rates(snr, inp, &ChannelRealization::default())?;
        return Ok(r.rx1 + r.rx2);
    }
    let rx2 = logdet_rates(snr, inp, &ChannelRealization::default())?.rx2;
    let rx1 = periodic_mean(PHASE_POINTS, |t| {
        let jg = build_joint(snr, inp, &GenieParams::silent(), &phases_for_offset(t, inp.upsilon))?;
        conditional_mi(&jg, &["X1", "X3"], &["Y1"], &[])
    })?;
    Ok(rx1 + rx2)
}
