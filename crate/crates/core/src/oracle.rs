//! Independent numerical checks of the optimality arguments behind the genie bound:
//! phase averaging, brute-force input optimization and the KKT problem.

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::gaussian::{periodic_mean, phases_for_offset, ChannelModel, Var, PHASE_POINTS};
use crate::model::{GenieParams, InputConfig, SnrSextet, C64};

/// Phase points per grid cell in the brute-force search.
pub const BRUTE_FORCE_PHASES: usize = 64;

const KKT_MAX_SWEEPS: usize = 10_000;
const KKT_STEP_TOL: f64 = 1e-10;

/// Constants of the phase-averaged conditional variance of Y1 given S1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub theta2: f64,
}

impl PhaseConstants {
    pub fn from_setup(snr: &SnrSextet, genie: &GenieParams, inp: &InputConfig) -> Self {
        let a = snr.snr11 * inp.p1;
        let b = snr.snr31 * inp.p3;
        PhaseConstants {
            c1: a + b,
            c2: 2.0 * (a * b).sqrt(),
            c3: 1.0 + snr.snr21 * inp.p2,
            c4: genie.eta1.norm_sqr(),
            c5: genie.eta1.norm() * genie.vtilde1.norm(),
            theta2: (genie.eta1.conj() * genie.vtilde1.conj()).arg(),
        }
    }

    /// var(Y1 | S1) at phase offset `theta1` and correlation magnitude `v`.
    pub fn integrand(&self, v: f64, theta1: f64) -> Result<f64> {
        let PhaseConstants { c1, c2, c3, c4, c5, theta2 } = *self;
        let s = c2 * theta1.cos() * v;
        let den = c1 + s + c4;
        if !(den > 0.0) {
            return domain(format!("integrand denominator {den:e} <= 0"));
        }
        Ok(c3 + (c1 * c4 + s * c4 - c5 * c5 - (c1 + s) * 2.0 * c5 * theta2.cos()) / den)
    }

    pub fn f2(&self, v: f64) -> Result<f64> {
        let PhaseConstants { c1, c2, c3, c4, c5, theta2 } = *self;
        let den = c1 + c4 - c2 * v;
        if !(den > 0.0) {
            return domain(format!("closed-form denominator {den:e} <= 0"));
        }
        let num = c3 * c4 + c1 * (c3 + c4) - c5 * c5 - c2 * c3 * v - c2 * c4 * v - 2.0 * c5 * (c1 - c2 * v) * theta2.cos();
        Ok(num / den)
    }

    pub fn f3(&self) -> Result<f64> {
        let PhaseConstants { c1, c3, c4, c5, theta2, .. } = *self;
        let den = c1 + c4;
        if !(den > 0.0) {
            return domain(format!("closed-form denominator {den:e} <= 0"));
        }
        Ok((c3 * c4 + c1 * (c3 + c4) - c5 * c5 - 2.0 * c5 * c1 * theta2.cos()) / den)
    }

    /// (mean over theta1 of log2 integrand, log2 f2(v)).
    pub fn phase_average(&self, v: f64) -> Result<(f64, f64)> {
        let numeric = periodic_mean(PHASE_POINTS, |t| self.integrand(v, t).map(f64::log2))?;
        Ok((numeric, self.f2(v)?.log2()))
    }
}

/// var(Y2 | S2) in closed form.
pub fn f1(snr: &SnrSextet, genie: &GenieParams, p2: f64, p3: f64) -> f64 {
    let a = snr.snr22 * p2;
    1.0 + a + snr.snr32 * p3 - (C64::from(a) + genie.eta2.conj() * genie.vtilde2.conj()).norm_sqr() / (a + genie.eta2.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Setup {
    pub snr: SnrSextet,
    pub genie: GenieParams,
    pub grid_resolution: usize,
}

pub fn phase_average_check(setup: &Prop1Setup, inp: &InputConfig) -> Result<(f64, f64)> {
    PhaseConstants::from_setup(&setup.snr, &setup.genie, inp).phase_average(inp.upsilon.norm())
}

/// h(Y1|S1) + h(Y2|S2) in bits up to the constant 2 log2(pi e), averaged over
/// the source/relay phase offset with `phases` points.
pub fn prop1_objective(setup: &Prop1Setup, inp: &InputConfig, phases: usize) -> Result<f64> {
    let base = ChannelModel::new(&setup.snr, inp, &setup.genie, &Default::default())?;
    let v2 = base.conditional_variance(Var::Y2, Var::S2);
    let leg1 = if inp.upsilon.norm() == 0.0 {
        positive_log2(base.conditional_variance(Var::Y1, Var::S1))?
    } else {
        periodic_mean(phases, |t| {
            let m = ChannelModel::new(&setup.snr, inp, &setup.genie, &phases_for_offset(t, inp.upsilon))?;
            positive_log2(m.conditional_variance(Var::Y1, Var::S1))
        })?
    };
    Ok(leg1 + positive_log2(v2)?)
}

fn positive_log2(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x.log2())
    } else {
        Err(Error::DegenerateEntropy(format!("conditional variance {x:e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Argmax {
    pub upsilon_abs: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub objective: f64,
}

/// Exhaustive search over (|upsilon|, P1, P2, P3) on a uniform grid of [0, 1]^4.
/// Ties go to the first point visited: |upsilon| ascending, powers descending.
pub fn prop1_bruteforce(setup: &Prop1Setup) -> Result<Prop1Argmax> {
    let n = setup.grid_resolution;
    if n < 2 {
        return domain("grid resolution must be at least 2");
    }
    let at = |k: usize| k as f64 / (n - 1) as f64;
    let down = |k: usize| at(n - 1 - k);
    let mut best: Option<Prop1Argmax> = None;
    for iv in 0..n {
        let v = at(iv);
        for i1 in 0..n {
            for i2 in 0..n {
                for i3 in 0..n {
                    let (p1, p2, p3) = (down(i1), down(i2), down(i3));
                    let inp = InputConfig::new(p1, p2, p3, C64::new(v, 0.0))?;
                    let obj = prop1_objective(setup, &inp, BRUTE_FORCE_PHASES)?;
                    if best.is_none_or(|b| obj > b.objective) {
                        best = Some(Prop1Argmax { upsilon_abs: v, p1, p2, p3, objective: obj });
                    }
                }
            }
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Checks that (P1 snr11 + P3 snr31 + P1 P3 snr11 snr32 + 2 sqrt(snr11 snr31 P1 P3)) / (1 + P3 snr32)
/// does not decrease along either power axis on a `grid` x `grid` lattice of [0, 1]^2.
pub fn maxp_gdof_monotonicity(snr: &SnrSextet, grid: usize) -> bool {
    if grid < 2 {
        return true;
    }
    let SnrSextet { snr11, snr31, snr32, .. } = *snr;
    let e = |p1: f64, p3: f64| {
        (p1 * snr11 + p3 * snr31 + p1 * p3 * snr11 * snr32 + 2.0 * (snr11 * snr31 * p1 * p3).sqrt()) / (1.0 + p3 * snr32)
    };
    let at = |k: usize| k as f64 / (grid - 1) as f64;
    for i in 0..grid {
        for j in 0..grid {
            let here = e(at(i), at(j));
            let slack = -1e-12 * (1.0 + here.abs());
            if i + 1 < grid && e(at(i + 1), at(j)) - here < slack {
                return false;
            }
            if j + 1 < grid && e(at(i), at(j + 1)) - here < slack {
                return false;
            }
        }
    }
    true
}

/// Maximize sum_i 1/2 (log2(snr11 dm_i + snr31 d3_i + nbar1) - log2(snr32 d3_i + nbar2))
/// over 2n coordinates with sum d3_i <= n, d3_i >= 0 and 0 <= dm_i <= 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktProblem {
    pub snr11: f64,
    pub snr31: f64,
    pub snr32: f64,
    pub nbar1: f64,
    pub nbar2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    pub d3: Vec<f64>,
    pub dm: Vec<f64>,
    pub objective: f64,
    pub sweeps: usize,
}

impl KktProblem {
    pub fn new(snr11: f64, snr31: f64, snr32: f64, nbar1: f64, nbar2: f64, n: usize) -> Result<Self> {
        let p = KktProblem { snr11, snr31, snr32, nbar1, nbar2, n };
        if n == 0 || [snr11, snr31, snr32, nbar1].iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return domain("KKT problem needs n >= 1 and finite nonnegative gains");
        }
        if !(0.0..=0.5).contains(&nbar2) {
            return domain(format!("nbar2 = {nbar2} outside [0, 1/2]"));
        }
        if !(p.margin() > 0.0) {
            return domain("objective is not increasing in d3 for this problem");
        }
        Ok(p)
    }

    /// nbar2 snr31 - snr32 snr11 / 2 - snr32 nbar1; positive means each term is
    /// increasing and concave in d3.
    pub fn margin(&self) -> f64 {
        self.nbar2 * self.snr31 - self.snr32 * self.snr11 / 2.0 - self.snr32 * self.nbar1
    }

    fn term(&self, d3: f64, dm: f64) -> f64 {
        0.5 * ((self.snr11 * dm + self.snr31 * d3 + self.nbar1).log2() - (self.snr32 * d3 + self.nbar2).log2())
    }

    fn dterm(&self, d3: f64, dm: f64) -> f64 {
        0.5 / std::f64::consts::LN_2
            * (self.snr31 / (self.snr11 * dm + self.snr31 * d3 + self.nbar1) - self.snr32 / (self.snr32 * d3 + self.nbar2))
    }

    pub fn objective(&self, d3: &[f64], dm: &[f64]) -> f64 {
        d3.iter().zip(dm).map(|(&a, &b)| self.term(a, b)).sum()
    }

    pub fn closed_form_optimum(&self) -> f64 {
        self.n as f64
            * ((self.snr11 + self.snr31 + 2.0 * self.nbar1).log2() - (self.snr32 + 2.0 * self.nbar2).log2())
    }

    /// Random feasible starting point.
    pub fn random_start<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
        let m = 2 * self.n;
        let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        let budget = self.n as f64 * rng.random::<f64>();
        let d3 = raw.iter().map(|x| x / total * budget).collect();
        let dm = (0..m).map(|_| 0.5 * rng.random::<f64>()).collect();
        (d3, dm)
    }
}

/// Best split of `s` between coordinates i and j. The pair objective is concave,
/// so its slope in x is decreasing and bisection finds the root.
fn best_split(p: &KktProblem, s: f64, dmi: f64, dmj: f64) -> f64 {
    let slope = |x: f64| p.dterm(x, dmi) - p.dterm(s - x, dmj);
    if slope(0.0) <= 0.0 {
        return 0.0;
    }
    if slope(s) >= 0.0 {
        return s;
    }
    let (mut a, mut b) = (0.0, s);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if slope(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Coordinate ascent: each dm_i goes to whichever endpoint its slope points to,
/// unused d3 budget goes to the steepest coordinate, then pairs of d3
/// coordinates exchange budget until no coordinate moves by more than 1e-10.
pub fn kkt_solve(prob: &KktProblem, start: (Vec<f64>, Vec<f64>)) -> Result<KktSolution> {
    let m = 2 * prob.n;
    let (mut d3, mut dm) = start;
    if d3.len() != m || dm.len() != m {
        return domain(format!("start must have {m} coordinates"));
    }
    let budget = prob.n as f64;
    if d3.iter().any(|&x| x < 0.0) || d3.iter().sum::<f64>() > budget * (1.0 + 1e-12) || dm.iter().any(|&x| !(0.0..=0.5).contains(&x)) {
        return domain("infeasible start");
    }
    for sweep in 1..=KKT_MAX_SWEEPS {
        let mut moved = 0.0f64;
        for i in 0..m {
            // slope in dm_i has the sign of snr11
            let next = if prob.snr11 > 0.0 { 0.5 } else { dm[i] };
            moved = moved.max((next - dm[i]).abs());
            dm[i] = next;
        }
        let slack = budget - d3.iter().sum::<f64>();
        if slack > 0.0 {
            let k = (0..m)
                .max_by(|&a, &b| prob.dterm(d3[a], dm[a]).total_cmp(&prob.dterm(d3[b], dm[b])))
                .expect("m >= 2");
            d3[k] += slack;
            moved = moved.max(slack);
        }
        for i in 0..m {
            for j in i + 1..m {
                let s = d3[i] + d3[j];
                let x = best_split(prob, s, dm[i], dm[j]);
                moved = moved.max((x - d3[i]).abs());
                d3[i] = x;
                d3[j] = s - x;
            }
        }
        if moved < KKT_STEP_TOL {
            let objective = prob.objective(&d3, &dm);
            return Ok(KktSolution { d3, dm, objective, sweeps: sweep });
        }
    }
    Err(Error::Consistency("KKT ascent did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::wi_feasible;
    use crate::gaussian::make_genie;
    use crate::model::sample_channel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> Prop1Setup {
        let snr = SnrSextet::symmetric(1.0, 0.01, 1e6).unwrap();
        let genie = make_genie(&snr, &wi_feasible(&snr).unwrap()).unwrap();
        Prop1Setup { snr, genie, grid_resolution: 5 }
    }

    fn consts() -> PhaseConstants {
        PhaseConstants { c1: 2.0, c2: 2.0, c3: 1.01, c4: 2.0402, c5: 1.01, theta2: 0.0 }
    }

    #[test]
    fn integrand_is_conditional_variance() {
        let s = setup();
        let inp = InputConfig::new(0.6, 0.7, 0.8, C64::from_polar(0.4, 1.1)).unwrap();
        let c = PhaseConstants::from_setup(&s.snr, &s.genie, &inp);
        for k in 0..16 {
            let t = k as f64 * 0.4;
            let m = ChannelModel::new(&s.snr, &inp, &s.genie, &phases_for_offset(t, inp.upsilon)).unwrap();
            let direct = m.conditional_variance(Var::Y1, Var::S1);
            assert!((c.integrand(0.4, t).unwrap() - direct).abs() < 1e-12);
        }
        assert!((f1(&s.snr, &s.genie, 0.7, 0.8) - ChannelModel::new(&s.snr, &inp, &s.genie, &sample_channel(3)).unwrap().conditional_variance(Var::Y2, Var::S2)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_is_the_worst_phase() {
        let c = consts();
        for v in [0.0, 0.25, 0.5, 1.0] {
            assert!((c.f2(v).unwrap() - c.integrand(v, std::f64::consts::PI).unwrap()).abs() < 1e-12);
        }
        assert_eq!(c.f3().unwrap(), c.f2(0.0).unwrap());
    }

    #[test]
    fn phase_average_sits_between_closed_forms() {
        let c = consts();
        let (num, cf) = c.phase_average(0.0).unwrap();
        assert!((num - cf).abs() < 1e-12);
        let (num, cf) = c.phase_average(0.5).unwrap();
        assert!((num - -0.40068).abs() < 1e-5, "{num}");
        assert!((cf - -0.55405).abs() < 1e-5, "{cf}");
        assert!(cf < num && num < c.f3().unwrap().log2());
    }

    #[test]
    fn zero_genie_correlation() {
        let c = PhaseConstants { c5: 0.0, ..consts() };
        let (num, cf) = c.phase_average(0.0).unwrap();
        assert!((num - cf).abs() < 1e-12);
    }

    #[test]
    fn bad_denominator() {
        let c = PhaseConstants { c1: 0.0, c2: 0.0, c4: 0.0, ..consts() };
        assert!(c.f2(0.5).is_err());
        assert!(c.phase_average(0.5).is_err());
    }

    #[test]
    fn bruteforce_picks_full_power_corner() {
        let a = prop1_bruteforce(&setup()).unwrap();
        assert_eq!((a.upsilon_abs, a.p1, a.p2, a.p3), (0.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn objective_slices() {
        let s = setup();
        let mut last = f64::NEG_INFINITY;
        for k in 0..=10 {
            let inp = InputConfig::new(1.0, k as f64 / 10.0, 1.0, C64::new(0.0, 0.0)).unwrap();
            let o = prop1_objective(&s, &inp, BRUTE_FORCE_PHASES).unwrap();
            assert!(o >= last - 1e-12);
            last = o;
        }
        let mut last = f64::INFINITY;
        for k in 0..=10 {
            let inp = InputConfig::new(1.0, 1.0, 1.0, C64::new(k as f64 / 10.0, 0.0)).unwrap();
            let o = prop1_objective(&s, &inp, BRUTE_FORCE_PHASES).unwrap();
            assert!(o <= last + 1e-12);
            last = o;
        }
    }

    #[test]
    fn maxp_examples() {
        assert!(maxp_gdof_monotonicity(&SnrSextet::new(1.0, 0.0, 100.0, 1.0, 0.1, 1.0).unwrap(), 21));
        assert!(maxp_gdof_monotonicity(&SnrSextet::new(1.0, 0.0, 100.0, 1.0, 0.0, 1.0).unwrap(), 21));
        assert!(!maxp_gdof_monotonicity(&SnrSextet::new(1.0, 0.0, 0.1, 1.0, 10.0, 1.0).unwrap(), 21));
    }

    #[test]
    fn kkt_example() {
        let p = KktProblem::new(1.0, 10.0, 0.01, 1.0, 0.4, 4).unwrap();
        let expect = 4.0 * (13f64.log2() - 0.81f64.log2());
        assert!((p.closed_form_optimum() - expect).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let sol = kkt_solve(&p, p.random_start(&mut rng)).unwrap();
            for (&a, &b) in sol.d3.iter().zip(&sol.dm) {
                assert!((a - 0.5).abs() < 1e-6);
                assert_eq!(b, 0.5);
            }
            assert!((sol.objective - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn kkt_rejects_non_increasing() {
        assert!(KktProblem::new(1.0, 0.01, 1.0, 1.0, 0.4, 2).is_err());
        assert!(KktProblem::new(1.0, 10.0, 0.01, 1.0, 0.6, 2).is_err());
    }
}
