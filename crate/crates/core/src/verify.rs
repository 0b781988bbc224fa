//! The acceptance suite, shared by `zicr verify` and the `acceptance` test target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{
    achievable_rates, cutset_bounds, genie_sum_upper_bound, relay_condition_holds, sum_capacity_zic,
    sum_capacity_zicr, wi_certificate_holds, wi_feasible,
};
use crate::gaussian::{build_joint, conditional_mi, logdet_rates, make_genie, JointGaussian};
use crate::gdof::{gdof_lower, gdof_max, gdof_upper, sweep_alpha};
use crate::geometry::{relay_region, snr_from_layout, NodeLayout, Point, RegionGrid};
use crate::model::{ChannelRealization, GdofExponents, GenieParams, HermitianCov, InputConfig, SnrSextet, C64};
use crate::oracle::{kkt_solve, prop1_bruteforce, KktProblem, PhaseConstants, Prop1Setup};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!("[{}] criterion {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

fn check(id: u8, name: &'static str, r: Result<(bool, String)>) -> Check {
    match r {
        Ok((passed, detail)) => Check { id, name, passed, detail },
        Err(e) => Check { id, name, passed: false, detail: format!("error: {e}") },
    }
}

fn log_uniform<R: Rng>(rng: &mut R, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

pub fn random_sextet<R: Rng>(rng: &mut R) -> SnrSextet {
    let mut d = || log_uniform(rng, -3.0, 3.0);
    SnrSextet { snr11: d(), snr21: d(), snr31: d(), snr22: d(), snr32: d(), snr13: d() }
}

/// Rejection sampler over log-uniform sextets in [1e-3, 1e3], keeping draws
/// that meet the relay condition and have a WI certificate.
pub fn feasible_sextets<R: Rng>(rng: &mut R, wanted: usize, max_draws: usize) -> (Vec<SnrSextet>, usize) {
    let mut out = Vec::with_capacity(wanted);
    let mut draws = 0;
    while out.len() < wanted && draws < max_draws {
        draws += 1;
        let s = random_sextet(rng);
        if relay_condition_holds(&s) && wi_feasible(&s).is_some() {
            out.push(s);
        }
    }
    (out, draws)
}

pub fn closed_forms_vs_logdet(seed: u64, samples: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let s = random_sextet(&mut rng);
            let inp = InputConfig::new(rng.random(), rng.random(), rng.random(), C64::new(0.0, 0.0))?;
            let ld = logdet_rates(&s, &inp, &ChannelRealization::sample(&mut rng))?;
            let rx1 = (1.0 + (inp.p1 * s.snr11 + inp.p3 * s.snr31) / (1.0 + inp.p2 * s.snr21)).log2();
            let rx2 = (1.0 + inp.p2 * s.snr22 / (1.0 + inp.p3 * s.snr32)).log2();
            let relay = (1.0 + inp.p1 * s.snr13).log2();
            let ach = achievable_rates(&s, &inp);
            for e in [ld.rx1 - rx1, ld.rx2 - rx2, ld.relay - relay, ach.r1 - rx1.min(relay), ach.r2 - rx2] {
                worst = worst.max(e.abs());
            }
        }
        Ok((worst < 1e-10, format!("{samples} sextets, max |log-det - closed form| = {worst:.3e} (tol 1e-10)")))
    };
    check(1, "closed forms match log-det mutual information", run())
}

pub fn tightness(seed: u64, wanted: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (set, draws) = feasible_sextets(&mut rng, wanted, 2_000_000);
        if set.len() < wanted {
            return Ok((false, format!("only {} feasible draws of {wanted} after {draws}", set.len())));
        }
        let mut gap = 0.0f64;
        let mut dominated = true;
        for s in &set {
            let cap = sum_capacity_zicr(s);
            let ach = achievable_rates(s, &InputConfig::full_power()).sum();
            gap = gap.max((cap.value - ach).abs());
            dominated &= cap.certified();
            dominated &= genie_sum_upper_bound(s).value >= ach - 1e-12;
            dominated &= cutset_bounds(s).sum() >= ach - 1e-12;
        }
        Ok((
            gap < 1e-12 && dominated,
            format!("{} feasible of {draws} draws, max |capacity - achievable| = {gap:.3e}, bounds dominate: {dominated}", set.len()),
        ))
    };
    check(2, "sum capacity is achieved and dominated by the outer bounds", run())
}

pub fn relay_gain_shape() -> Check {
    let run = || -> Result<(bool, String)> {
        let at = |db: f64| -> Result<(f64, f64)> {
            let c = 10f64.powf(db / 10.0);
            let s = SnrSextet::symmetric(1.0, c, 1e6)?;
            Ok((sum_capacity_zicr(&s).value, sum_capacity_zic(&s.without_relay()).value))
        };
        let mut ok = true;
        let mut notes = Vec::new();
        for db in [-20.0, -10.0, -3.0] {
            let (r, z) = at(db)?;
            ok &= r - z > 0.0;
            notes.push(format!("{db} dB: {:+.4}", r - z));
        }
        let (r, z) = at(0.0)?;
        ok &= (r - z).abs() < 1e-12;
        notes.push(format!("0 dB: {:.1e}", r - z));
        let (r, z) = at(3.0)?;
        ok &= r < z;
        notes.push(format!("+3 dB: {:+.4}", r - z));
        let (r, z) = at(-60.0)?;
        ok &= (r - 3f64.log2() - 1.0).abs() < 1e-5 && (z - 2.0).abs() < 1e-5;
        notes.push(format!("limits {r:.4}/{z:.4}"));
        Ok((ok, notes.join(", ")))
    };
    check(3, "relay gain over the Z-IC across interference levels", run())
}

pub fn gdof_grid() -> Check {
    let run = || -> Result<(bool, String)> {
        let n = 50;
        let g = |k: usize, top: f64| top * k as f64 / (n - 1) as f64;
        let (mut sandwich, mut tight, mut region) = (true, true, 0usize);
        for ia in 0..n {
            for ib in 0..n {
                for ig in 0..n {
                    for il in 0..n {
                        let e = GdofExponents::new(g(ia, 1.2), g(ib, 3.0), g(ig, 3.0), g(il, 1.2))?;
                        let lo = gdof_lower(&e);
                        let up = gdof_upper(&e);
                        sandwich &= lo <= up.value + 1e-12;
                        if let Some(m) = gdof_max(&e) {
                            region += 1;
                            tight &= (lo - m).abs() < 1e-12 && (up.value - m).abs() < 1e-12 && up.valid;
                        }
                    }
                }
            }
        }
        let a0 = &sweep_alpha(2.0, 2.0, 3)?;
        let spot_zero = a0[0].lower == 3.0 && a0[0].upper.value == 3.0;
        let half = a0[1];
        let spot_half = half.alpha == 0.5
            && (half.lower - 2.0).abs() < 1e-12
            && (half.upper.formula() - 2.0).abs() < 1e-12
            && half.max_certified.is_none();
        let spot_low = (gdof_lower(&GdofExponents::new(0.1, 1.2, 1.2, 0.1)?) - 2.0).abs() < 1e-12;
        Ok((
            sandwich && tight && region > 0 && spot_zero && spot_half && spot_low,
            format!(
                "50^4 grid: sandwich {sandwich}, tight on {region} certified points {tight}; spots alpha=0 {spot_zero}, alpha=0.5 {spot_half}, beta=1.2 {spot_low}"
            ),
        ))
    };
    check(4, "GDoF bounds sandwich and meet on the certified region", run())
}

pub fn genie_construction(seed: u64, scenarios: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (set, _) = feasible_sextets(&mut rng, scenarios, 2_000_000);
        if set.len() < scenarios {
            return Ok((false, format!("only {} feasible scenarios", set.len())));
        }
        let (mut prod, mut mi) = (0.0f64, 0.0f64);
        let mut ineq = true;
        for s in &set {
            let c = wi_feasible(s).expect("sampler keeps feasible draws");
            let g = make_genie(s, &c)?;
            prod = prod.max(((g.eta1 * g.vtilde1).re - (1.0 + s.snr21)).abs() / (1.0 + s.snr21));
            prod = prod.max(((g.eta2 * g.vtilde2).re - (1.0 + s.snr32)).abs() / (1.0 + s.snr32));
            ineq &= s.snr32 * g.eta1.norm_sqr()
                <= (s.snr31 * (1.0 - g.vtilde2.norm_sqr()) - 2.0 * s.snr32 * s.snr11) * (1.0 + 1e-12);
            ineq &= s.snr21 * g.eta2.norm_sqr() <= s.snr22 * (1.0 - g.vtilde1.norm_sqr()) * (1.0 + 1e-12);
            let jg = build_joint(s, &InputConfig::full_power(), &g, &ChannelRealization::sample(&mut rng))?;
            mi = mi.max(conditional_mi(&jg, &["X1", "X3"], &["S1"], &["Y1"])?);
            mi = mi.max(conditional_mi(&jg, &["X2"], &["S2"], &["Y2"])?);
        }
        Ok((
            prod < 1e-14 && ineq && mi < 1e-10,
            format!("{scenarios} scenarios: product identity rel err {prod:.1e}, inequalities {ineq}, max genie MI {mi:.1e}"),
        ))
    };
    check(5, "genie is useless given the outputs", run())
}

fn noise_match_setup<R: Rng>(rng: &mut R, holds: bool) -> Result<(JointGaussian, f64)> {
    // X = (X1, X2) correlated, D = c1 X1 + c2 X2, Y_k = D + Z_k
    let cx = |r: &mut R| C64::from_polar(r.random_range(0.5..2.0), r.random_range(0.0..std::f64::consts::TAU));
    let (c1, c2) = (cx(rng), cx(rng));
    let (vx1, vx2): (f64, f64) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let rho = C64::from_polar(rng.random_range(0.0..0.8), rng.random_range(0.0..std::f64::consts::TAU));
    let x12 = rho * (vx1 * vx2).sqrt();
    let v2 = rng.random_range(0.5..2.0);
    let ratio = if holds {
        C64::new(1.0, 0.0)
    } else {
        C64::new(1.0, 0.0) + C64::from_polar(rng.random_range(0.01..0.5), rng.random_range(0.0..std::f64::consts::TAU))
    };
    let z12 = ratio * v2;
    let v1 = ratio.norm_sqr() * v2 + rng.random_range(0.1..1.0);

    // sources: X1 X2 Z1 Z2
    let mut sig = nalgebra::DMatrix::<C64>::zeros(4, 4);
    sig[(0, 0)] = C64::from(vx1);
    sig[(1, 1)] = C64::from(vx2);
    sig[(0, 1)] = x12;
    sig[(1, 0)] = x12.conj();
    sig[(2, 2)] = C64::from(v1);
    sig[(3, 3)] = C64::from(v2);
    sig[(2, 3)] = z12;
    sig[(3, 2)] = z12.conj();
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let t = nalgebra::DMatrix::from_row_slice(
        4,
        4,
        &[one, zero, zero, zero, zero, one, zero, zero, c1, c2, one, zero, c1, c2, zero, one],
    );
    let cov = HermitianCov::new(&t * sig * t.adjoint())?;
    let jg = JointGaussian::new(cov, ["X1", "X2", "Y1", "Y2"].iter().map(|s| s.to_string()).collect())?;
    Ok((jg, (z12 - C64::from(v2)).norm() / v2))
}

pub fn noise_match_iff(seed: u64, setups: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst_zero, mut least_pos) = (0.0f64, f64::INFINITY);
        let mut ok = true;
        for k in 0..setups {
            let (jg, gap) = noise_match_setup(&mut rng, k % 2 == 0)?;
            let mi = conditional_mi(&jg, &["X1", "X2"], &["Y1"], &["Y2"])?;
            if gap < 1e-12 {
                ok &= mi < 1e-10;
                worst_zero = worst_zero.max(mi);
            } else if gap > 0.01 {
                ok &= mi > 1e-6;
                least_pos = least_pos.min(mi);
            }
        }
        Ok((ok, format!("{setups} setups: max MI when condition holds {worst_zero:.1e}, min MI when violated {least_pos:.1e}")))
    };
    check(6, "zero conditional information iff noise cross-covariance matches", run())
}

pub fn input_optimality(seed: u64, scenarios: usize, resolution: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (set, _) = feasible_sextets(&mut rng, scenarios, 2_000_000);
        if set.len() < scenarios {
            return Ok((false, format!("only {} feasible scenarios", set.len())));
        }
        let at = |k: usize| k as f64 / (resolution - 1) as f64;
        let (mut corner, mut f2_mono, mut f3_mono) = (0usize, true, true);
        for s in &set {
            let genie = make_genie(s, &wi_feasible(s).expect("feasible"))?;
            let setup = Prop1Setup { snr: *s, genie, grid_resolution: resolution };
            let a = prop1_bruteforce(&setup)?;
            if (a.upsilon_abs, a.p1, a.p2, a.p3) == (0.0, 1.0, 1.0, 1.0) {
                corner += 1;
            }
            let full = PhaseConstants::from_setup(s, &genie, &InputConfig::full_power());
            let scale = |x: f64| 1e-12 * (1.0 + x.abs());
            for k in 1..resolution {
                let (prev, here) = (full.f2(at(k - 1))?, full.f2(at(k))?);
                f2_mono &= here - prev <= scale(prev);
            }
            let f3 = |i: usize, j: usize, l: usize| -> Result<f64> {
                PhaseConstants::from_setup(s, &genie, &InputConfig::new(at(i), at(j), at(l), C64::new(0.0, 0.0))?).f3()
            };
            for i in 0..resolution {
                for j in 0..resolution {
                    for l in 0..resolution {
                        let here = f3(i, j, l)?;
                        for next in [(i + 1, j, l), (i, j + 1, l), (i, j, l + 1)] {
                            if next.0 < resolution && next.1 < resolution && next.2 < resolution {
                                f3_mono &= f3(next.0, next.1, next.2)? - here >= -scale(here);
                            }
                        }
                    }
                }
            }
        }
        Ok((
            corner == scenarios && f2_mono && f3_mono,
            format!("argmax at (0,1,1,1) in {corner}/{scenarios}; f2 non-increasing {f2_mono}; f3 non-decreasing {f3_mono}"),
        ))
    };
    check(7, "full power and independent inputs maximize the genie bound", run())
}

/// Physically consistent constants: random channel, powers and genie.
fn random_constants<R: Rng>(rng: &mut R) -> Result<(PhaseConstants, f64)> {
    let s = random_sextet(rng);
    let inp = InputConfig::new(rng.random(), rng.random(), rng.random(), C64::new(0.0, 0.0))?;
    let g = GenieParams::new(
        C64::from_polar(log_uniform(rng, -1.0, 1.0), rng.random_range(0.0..std::f64::consts::TAU)),
        C64::new(1.0, 0.0),
        C64::from_polar(rng.random_range(0.0..1.0), rng.random_range(0.0..std::f64::consts::TAU)),
        C64::new(0.0, 0.0),
    )?;
    Ok((PhaseConstants::from_setup(&s, &g, &inp), rng.random()))
}

pub fn phase_average(seed: u64, draws: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst, mut bracketed) = (0.0f64, 0usize);
        for _ in 0..draws {
            let (c, v) = random_constants(&mut rng)?;
            let (num, cf) = c.phase_average(v)?;
            worst = worst.max((num - cf).abs());
            if cf <= num + 1e-12 && num <= c.f3()?.log2() + 1e-12 {
                bracketed += 1;
            }
        }
        Ok((
            worst < 1e-9,
            format!(
                "{draws} draws: max |quadrature - closed form| = {worst:.3e} (tol 1e-9); closed form <= average <= f3 in {bracketed}/{draws}"
            ),
        ))
    };
    check(8, "phase-averaged conditional variance matches its closed form", run())
}

pub fn kkt(seed: u64, problems: usize, starts: usize) -> Check {
    let run = || -> Result<(bool, String)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut dev, mut gap, mut solved) = (0.0f64, 0.0f64, 0usize);
        while solved < problems {
            let p = KktProblem::new(
                log_uniform(&mut rng, -1.0, 1.0),
                log_uniform(&mut rng, 0.0, 2.0),
                log_uniform(&mut rng, -3.0, -1.0),
                rng.random_range(0.1..2.0),
                rng.random_range(0.1..0.5),
                rng.random_range(1..6),
            );
            let Ok(p) = p else { continue };
            solved += 1;
            for _ in 0..starts {
                let sol = kkt_solve(&p, p.random_start(&mut rng))?;
                for x in sol.d3.iter().chain(&sol.dm) {
                    dev = dev.max((x - 0.5).abs());
                }
                gap = gap.max((sol.objective - p.closed_form_optimum()).abs());
            }
        }
        Ok((
            dev < 1e-6 && gap < 1e-6,
            format!("{problems} problems x {starts} starts: max |d - 1/2| = {dev:.1e}, max objective gap {gap:.1e}"),
        ))
    };
    check(9, "KKT ascent reaches the uniform allocation", run())
}

pub fn relay_region_check() -> Check {
    let run = || -> Result<(bool, String)> {
        let layout = NodeLayout::default();
        let grid = RegionGrid::default();
        let mask = relay_region(&layout, &grid)?;
        let count = mask.count();
        let closer = mask.centroid().is_some_and(|c| c.dist(&layout.rx1) < c.dist(&layout.rx2));
        let mut revalid = true;
        for (p, inside) in mask.cells() {
            if inside {
                let s = snr_from_layout(&layout, &p)?;
                revalid &= relay_condition_holds(&s) && wi_feasible(&s).is_some_and(|c| wi_certificate_holds(&s, &c));
            }
        }
        let moved = NodeLayout { tx2: Point::new(layout.rx1.x, layout.rx1.y + 0.09), ..layout };
        let empty = relay_region(&moved, &grid)?.count() == 0;
        Ok((
            count > 0 && closer && revalid && empty,
            format!("{count} cells inside, centroid nearer Rx1 {closer}, cells re-validate {revalid}, empty with Tx2 by Rx1 {empty}"),
        ))
    };
    check(10, "relay placement region", run())
}

pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        closed_forms_vs_logdet(seed, 10_000),
        tightness(seed + 1, 500),
        relay_gain_shape(),
        gdof_grid(),
        genie_construction(seed + 2, 20),
        noise_match_iff(seed + 3, 1_000),
        input_optimality(seed + 4, 20, 21),
        phase_average(seed + 5, 100),
        kkt(seed + 6, 10, 10),
        relay_region_check(),
    ]
}
