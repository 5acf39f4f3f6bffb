//! Acceptance criteria. Each test prints one PASS/FAIL line; tolerances and time budgets are
//! pinned here and never loosened to make a line pass.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use fbpme::estimates::{apriori_batch, bilinear_batch, duhamel_batch, fit_global_constant, interpolation_batch};
use fbpme::lp::{block_norms, paraproduct};
use fbpme::pressure::estimate_sigma;
use fbpme::record::{cumulative_trapezoid, FieldTrajectory};
use fbpme::solver::{picard_solve, semigroup_apply, time_march, PicardStatus, RunStatus};
use fbpme::spectral::{dealias, is_retained, product};
use fbpme::testfields::{gaussian, random_block_field, rng, top_unaliased_block};
use fbpme::wellposedness::{admissible, blowup_monitor, local_time_bound, select_lambda, smallness_check, MonitorStatus};
use fbpme::*;

/// `dxi = 3/4`: the dyadic band starts at block 0.
fn grid(dim: usize, points: usize) -> GridSpec {
    GridSpec::new(dim, points, 4.0 * PI / 3.0).unwrap()
}

fn report(id: u32, name: &str, pass: bool, elapsed: Duration, budget: Duration, detail: String) {
    let ok = pass && elapsed <= budget;
    println!(
        "criterion {id:>2} [{name}]: {} | {detail} | {:.2?} of {:.0?}",
        if ok { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(elapsed <= budget, "criterion {id} over its time budget: {elapsed:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

// Independent restatement of the cutoff: 1 below 3/4, 0 above 4/3, smooth exp(-1/t) blend.
fn oracle_profile(r: f64) -> f64 {
    let chi = |r: f64| {
        let (a, b) = (0.75, 4.0 / 3.0);
        if r <= a {
            return 1.0;
        }
        if r >= b {
            return 0.0;
        }
        let s = (r - a) / (b - a);
        let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
        f(1.0 - s) / (f(1.0 - s) + f(s))
    };
    chi(r / 2.0) - chi(r)
}

#[test]
fn criterion_01_partition_of_unity() {
    let start = Instant::now();
    let mut worst_sum: f64 = 0.0;
    let mut worst_profile: f64 = 0.0;
    let mut overlaps = 0usize;
    for g in [grid(1, 256), grid(2, 128)] {
        let part = build_partition(&g).unwrap();
        let (lo, hi) = part.resolved_band();
        let norms = g.xi_norms();
        for (f, &r) in norms.iter().enumerate() {
            let sum: f64 = part.j_range().map(|j| part.mask(j).unwrap()[f]).sum();
            if (lo..=hi).contains(&r) {
                worst_sum = worst_sum.max((sum - 1.0).abs());
            }
            for j in part.j_range() {
                let m = part.mask(j).unwrap()[f];
                worst_profile = worst_profile.max((m - oracle_profile(r * 2f64.powi(-j))).abs());
                for k in part.j_range().filter(|k| (k - j).abs() >= 2) {
                    if m * part.mask(k).unwrap()[f] != 0.0 {
                        overlaps += 1;
                    }
                }
            }
        }
    }
    let pass = worst_sum < 1e-12 && overlaps == 0 && worst_profile < 1e-15;
    report(
        1,
        "partition of unity",
        pass,
        start.elapsed(),
        secs(1),
        format!("max |sum phi_j - 1| = {worst_sum:.2e} (< 1e-12), far-block overlaps = {overlaps}, profile vs oracle {worst_profile:.1e}"),
    );
}

/// Linear convolution over the retained band, divided by the box length.
fn convolution_oracle(g: &GridSpec, u: &SpectralField, v: &SpectralField) -> Vec<Complex64> {
    let n = g.points() as i64;
    let mut out = vec![Complex64::default(); g.len()];
    for (f, o) in out.iter_mut().enumerate() {
        let k = g.signed_k(f);
        if !is_retained(g, k) {
            continue;
        }
        for l in -n / 2..n / 2 {
            let m = k - l;
            if is_retained(g, l) && is_retained(g, m) {
                *o += u.coeffs[g.index_of_k(l).unwrap()] * v.coeffs[g.index_of_k(m).unwrap()];
            }
        }
        *o /= g.volume();
    }
    out
}

#[test]
fn criterion_02_bony_reconstruction() {
    let start = Instant::now();
    let g = grid(1, 128);
    let part = build_partition(&g).unwrap();
    let top = top_unaliased_block(&g);
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for case in 0..100u64 {
        let mut r = rng(1000 + case);
        let mut u = random_block_field(g, part.j_min() - 1..=top, 3, &mut r);
        let mut v = random_block_field(g, part.j_min() - 1..=top, 3, &mut r);
        // sub-band content exercises the low residue
        u.axpy(0.3, &gaussian(g, 1.0, 2.0).unwrap());
        v.axpy(-0.2, &gaussian(g, 1.0, 1.5).unwrap());
        let uv = product(&u, &v).unwrap();
        let oracle = convolution_oracle(&g, &u, &v);
        let scale = oracle.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let gap = uv.coeffs.iter().zip(&oracle).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst_oracle = worst_oracle.max(gap / scale);
        let bony = paraproduct(&u, &v, &part).unwrap().sum();
        let err = bony.sub(&dealias(&uv)).l2_norm() / dealias(&uv).l2_norm();
        worst = worst.max(err);
    }
    let pass = worst < 1e-10 && worst_oracle < 1e-12;
    report(
        2,
        "Bony reconstruction",
        pass,
        start.elapsed(),
        secs(10),
        format!("max rel residual {worst:.2e} (< 1e-10) over 100 pairs; pseudo-spectral product vs direct convolution {worst_oracle:.1e}"),
    );
}

#[test]
fn criterion_03_semigroup_block_decay() {
    let start = Instant::now();
    let mut violations = 0usize;
    let mut checks = 0usize;
    let mut tightest: f64 = 0.0;
    for g in [grid(1, 128), grid(2, 64)] {
        let part = build_partition(&g).unwrap();
        let norms = g.xi_norms();
        let u0 = random_block_field(g, part.j_min()..=part.j_max(), 6, &mut rng(33));
        for alpha in [1.5, 2.0, 3.0] {
            for t in [0.01, 0.1, 1.0] {
                let ut = semigroup_apply(&u0, t, alpha).unwrap();
                for j in part.j_range() {
                    let bound = (-t * 2f64.powf(j as f64 * alpha) * 0.75f64.powf(alpha)).exp();
                    // the multiplier itself is dominated on the block support
                    for (f, &m) in part.mask(j).unwrap().iter().enumerate() {
                        if m > 0.0 && (-t * norms[f].powf(alpha)).exp() > bound {
                            violations += 1;
                        }
                    }
                    for p in [Exponent::ONE, Exponent::TWO, Exponent::INFINITY] {
                        let before = block_norms(&u0, p, &part)[(j - part.j_min()) as usize];
                        let after = block_norms(&ut, p, &part)[(j - part.j_min()) as usize];
                        checks += 1;
                        if after > bound * before {
                            violations += 1;
                        }
                        if before > 0.0 && bound > 0.0 {
                            tightest = tightest.max(after / (bound * before));
                        }
                    }
                }
            }
        }
    }
    report(
        3,
        "semigroup block decay",
        violations == 0,
        start.elapsed(),
        secs(5),
        format!("{violations} violations in {checks} block checks (exact comparison), tightest LHS/bound {tightest:.6}"),
    );
}

#[test]
fn criterion_04_heat_kernel_regression() {
    let start = Instant::now();
    let g = GridSpec::new(1, 128, 20.0).unwrap();
    let (amp, w, horizon) = (1.0, 1.0, 0.5);
    let u0 = gaussian(g, amp, w).unwrap();
    let params = ModelParams::new(2.0, PressureSpec::riesz(0.5).unwrap(), 1, Exponent::TWO, Exponent::TWO).unwrap();
    let mut worst: f64 = 0.0;
    let mut worst_phys: f64 = 0.0;
    for dt in [None, Some(0.01), Some(horizon / 7.0), Some(horizon)] {
        let mut cfg = SolverConfig::new(horizon);
        cfg.nonlinear = false;
        cfg.dt = dt;
        let out = time_march(&u0, &params, &cfg).unwrap();
        // closed form: the Gaussian transform times e^{-t|xi|^2}, dealiased like the data
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for f in 0..g.len() {
            let xi = g.xi(f)[0];
            let exact = if is_retained(&g, g.signed_k(f)) {
                amp * (2.0 * PI).sqrt() * w * (-(0.5 * w * w + horizon) * xi * xi).exp()
            } else {
                0.0
            };
            num = num.max((out.final_field.coeffs[f] - exact).norm());
            den = den.max(exact.abs());
        }
        worst = worst.max(num / den);
        // physical space: a Gaussian of variance w^2 + 2t
        let phys = fbpme::spectral::inverse_transform(&out.final_field).unwrap();
        let var = w * w + 2.0 * horizon;
        let peak = amp * w / var.sqrt();
        for (i, v) in phys.values.iter().enumerate() {
            let x = g.x(i)[0];
            worst_phys = worst_phys.max((v - peak * (-x * x / (2.0 * var)).exp()).abs() / peak);
        }
    }
    report(
        4,
        "heat-kernel regression",
        worst < 1e-8 && worst_phys < 1e-8,
        start.elapsed(),
        secs(5),
        format!("max rel error {worst:.2e} spectral, {worst_phys:.2e} physical (< 1e-8) for 4 step sizes"),
    );
}

#[test]
fn criterion_05_mean_conservation() {
    let start = Instant::now();
    let g = grid(1, 128);
    let mut drift: f64 = 0.0;
    let mut details = Vec::new();
    for pressure in [PressureSpec::riesz(0.5).unwrap(), PressureSpec::exp_kernel()] {
        let name = pressure.name();
        let params = ModelParams::new(2.0, pressure, 1, Exponent::TWO, Exponent::TWO).unwrap();
        let u0 = gaussian(g, 2.0, 0.7).unwrap();
        let dt = SolverConfig::default_dt(&g, 2.0);
        let mut cfg = SolverConfig::new(1000.0 * dt);
        cfg.dt = Some(dt);
        let out = time_march(&u0, &params, &cfg).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        let m0 = out.record.mean_mode[0];
        let d = out.record.mean_mode.iter().map(|m| (m - m0).norm()).fold(0.0, f64::max);
        details.push(format!("{name}: {} steps, drift {d:.1e}", out.steps));
        assert!(out.steps >= 1000);
        drift = drift.max(d);
    }
    report(5, "mean conservation", drift < 1e-12, start.elapsed(), secs(60), format!("{} (< 1e-12)", details.join("; ")));
}

#[test]
fn criterion_06_sigma_recovery() {
    let start = Instant::now();
    let g = GridSpec::new(1, 1024, PI / (0.75 / 16.0)).unwrap();
    let part = build_partition(&g).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    let cases = [
        (PressureSpec::riesz(0.25).unwrap(), 0.5),
        (PressureSpec::riesz(0.5).unwrap(), 0.0),
        (PressureSpec::riesz(0.75).unwrap(), -0.5),
        (PressureSpec::identity(), 1.0),
        (PressureSpec::exp_kernel(), 0.0),
    ];
    for (spec, target) in cases {
        let est = estimate_sigma(&spec, &g, &part, Exponent::TWO).unwrap();
        let ok = (est.slope - target).abs() <= 0.05;
        pass &= ok;
        lines.push(format!(
            "{}{} {:.3} vs {target} {}",
            spec.name(),
            match spec.kind() {
                PressureKind::Riesz { s } => format!("(s={s})"),
                _ => String::new(),
            },
            est.slope,
            if ok { "ok" } else { "MISS" }
        ));
    }
    report(6, "sigma recovery", pass, start.elapsed(), secs(10), format!("{} (tol 0.05)", lines.join(", ")));
}

#[test]
fn criterion_07_picard_marcher_agreement() {
    let start = Instant::now();
    let g = grid(1, 128);
    let part = build_partition(&g).unwrap();
    // alpha inside the r = 2 range (2, 2.5) for n = 1, p = 2, sigma = 0
    let alpha = 2.25;
    let params = ModelParams::new(alpha, PressureSpec::riesz(0.5).unwrap(), 1, Exponent::TWO, Exponent::TWO).unwrap();
    let ratios: Vec<f64> = [
        apriori_batch(g, &params, 1.0, 24, 71).unwrap(),
        bilinear_batch(g, g, &params, 24, 72).unwrap(),
        duhamel_batch(g, &params, 1.0, Exponent::TWO, 24, 73).unwrap(),
    ]
    .iter()
    .flat_map(|b| b.ratios.clone())
    .collect();
    let c_fit = fit_global_constant(&ratios).unwrap();

    let shape = gaussian(g, 1.0, 1.0).unwrap();
    let base = smallness_check(&shape, &params, c_fit, &part).unwrap();
    let u0 = shape.scaled(0.5 * base.margin);
    let small = smallness_check(&u0, &params, c_fit, &part).unwrap();
    let lambda = select_lambda(&u0, &params, c_fit, &part).unwrap();
    let horizon = local_time_bound(small.norm, lambda, alpha, c_fit, Exponent::TWO).unwrap().two;

    let mut cfg = SolverConfig::new(horizon);
    cfg.picard_nodes = 128;
    let pic = picard_solve(&u0, &params, &cfg).unwrap();
    let march = time_march(&u0, &params, &cfg).unwrap();
    let rel = pic.final_field().sub(&march.final_field).l2_norm() / march.final_field.l2_norm();
    let max_ratio = pic.ratios.iter().copied().fold(0.0, f64::max);
    let bound = 2.0 * c_fit * small.norm;
    let pass = small.pass
        && pic.status == PicardStatus::Converged
        && march.status == RunStatus::Completed
        && rel < 1e-6
        && max_ratio < 1.0
        && pic.x_norm <= bound;
    report(
        7,
        "Picard vs marcher",
        pass,
        start.elapsed(),
        secs(120),
        format!(
            "C_fit {c_fit:.3}, T {horizon:.3}, rel gap {rel:.2e} (< 1e-6), max ratio {max_ratio:.3} (< 1), |u|_X {:.4} <= {bound:.4}",
            pic.x_norm
        ),
    );
}

#[test]
fn criterion_08_bilinear_stability() {
    let start = Instant::now();
    let params = ModelParams::new(2.25, PressureSpec::riesz(0.5).unwrap(), 1, Exponent::TWO, Exponent::TWO).unwrap();
    let coarse = grid(1, 64);
    let fine = grid(1, 128);
    let a = bilinear_batch(coarse, coarse, &params, 50, 800).unwrap().max();
    let b = bilinear_batch(fine, coarse, &params, 50, 800).unwrap().max();
    let change = (a / b).max(b / a);
    report(
        8,
        "bilinear stability",
        change < 2.0 && a.is_finite() && a > 0.0,
        start.elapsed(),
        secs(60),
        format!("max ratio {a:.4} at N=64, {b:.4} at N=128, change x{change:.3} (< x2)"),
    );
}

#[test]
fn criterion_09_interpolation() {
    let start = Instant::now();
    let g = grid(1, 128);
    let params = FBNormParams::new(-0.5, Exponent::TWO, Exponent::TWO);
    let mut worst: f64 = 0.0;
    let triples = [
        (0.5, Exponent::ONE, Exponent::INFINITY),
        (1.0 / 3.0, Exponent::ONE, Exponent::TWO),
        (0.75, Exponent::TWO, Exponent::INFINITY),
    ];
    for (i, (theta, r1, r2)) in triples.into_iter().enumerate() {
        let batch = interpolation_batch(g, theta, r1, r2, params, 2.0, 100, 900 + 100 * i as u64).unwrap();
        worst = worst.max(batch.max());
    }
    report(
        9,
        "interpolation",
        worst <= 1.0 + 1e-8,
        start.elapsed(),
        secs(10),
        format!("max ratio {worst:.6} (<= 1 + 1e-8) over 3 x 100 trajectories"),
    );
}

#[test]
fn criterion_10_index_predicates() {
    let start = Instant::now();
    let dims_p = [
        (1, 1.0),
        (1, 2.0),
        (1, f64::INFINITY),
        (2, 1.0),
        (2, 2.0),
        (2, 4.0),
        (2, f64::INFINITY),
        (3, 1.5),
        (3, 2.0),
        (3, f64::INFINITY),
    ];
    let mut points = 0;
    let mut mismatches = 0;
    let mut inclusion_failures = 0;
    for (n, pv) in dims_p {
        let p = if pv.is_infinite() { Exponent::INFINITY } else { Exponent::new(pv).unwrap() };
        for si in 0..10 {
            let sigma = -1.5 + 0.35 * si as f64;
            for ai in 0..10 {
                let alpha = 0.3 + 0.55 * ai as f64;
                points += 1;
                let upper = n as f64 * (1.0 - 1.0 / pv) + sigma + 2.0;
                let base = f64::max(1.0, sigma + 1.0);
                let thm = 2.0 * base < alpha && alpha < upper;
                let improved = base < alpha && alpha < upper;
                let r = 1.0 + 0.37 * ((si + ai) % 7) as f64;
                let with_r = if r == 1.0 { false } else { r / (r - 1.0) * base < alpha && alpha < upper };
                let rep = admissible(n, p, alpha, sigma, Exponent::new(r).unwrap());
                if rep.admissible_r2 != thm || rep.admissible_improved != improved || rep.admissible != with_r {
                    mismatches += 1;
                }
                if rep.admissible_r2 && !rep.admissible_improved {
                    inclusion_failures += 1;
                }
                let beta = n as f64 * (1.0 - 1.0 / pv) - alpha + sigma + 1.0;
                if (rep.beta - beta).abs() > 1e-12 {
                    mismatches += 1;
                }
            }
        }
    }
    report(
        10,
        "index predicates",
        points == 1000 && mismatches == 0 && inclusion_failures == 0,
        start.elapsed(),
        secs(1),
        format!("{points} points, {mismatches} mismatches, {inclusion_failures} inclusion failures"),
    );
}

#[test]
fn criterion_11_blowup_monitor() {
    let start = Instant::now();
    // (a) stored trajectory: quadrature agreement and additivity
    let g = grid(1, 128);
    let part = build_partition(&g).unwrap();
    let params = ModelParams::new(2.0, PressureSpec::riesz(0.5).unwrap(), 1, Exponent::TWO, Exponent::TWO).unwrap();
    let u0 = gaussian(g, 1.0, 0.8).unwrap();
    let mut cfg = SolverConfig::new(0.4);
    let stops: Vec<f64> = (1..=20).map(|i| 0.02 * i as f64).collect();
    cfg.snapshots = stops.clone();
    cfg.record_every = usize::MAX;
    let out = time_march(&u0, &params, &cfg).unwrap();
    let mon = blowup_monitor(&out.record, &params, false).unwrap();
    let mut times = vec![0.0];
    let mut fields = vec![u0.clone()];
    for (t, u) in &out.snapshots {
        times.push(*t);
        fields.push(u.clone());
    }
    assert_eq!(times, out.record.times);
    let traj = FieldTrajectory::new(times.clone(), fields).unwrap();
    let series: Vec<f64> = traj.fields.iter().map(|u| fb_norm(u, params.smoothing_norm(), &part)).collect();
    let mut direct = 0.0;
    let mut quad_err: f64 = 0.0;
    for i in 1..times.len() {
        direct += 0.5 * (times[i] - times[i - 1]) * (series[i] + series[i - 1]);
        quad_err = quad_err.max((mon.integral[i] - direct).abs() / direct);
    }
    let k = times.len() / 3;
    let head = blowup_monitor(&out.record.slice(0..k + 1), &params, false).unwrap().total();
    let tail = blowup_monitor(&out.record.slice(k..times.len()), &params, false).unwrap().total();
    let additivity = (head + tail - mon.total()).abs() / mon.total();
    let recorded = cumulative_trapezoid(&out.record.times, &out.record.fb_norms[1].values);
    let stored_gap = recorded.iter().zip(&mon.integral).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    // (b) attractive aggregation at large amplitude, with a repulsive control
    let fine = grid(1, 512);
    let run = |pressure: PressureSpec| {
        let p = ModelParams::new(0.5, pressure, 1, Exponent::TWO, Exponent::TWO).unwrap();
        let mut c = SolverConfig::new(0.6);
        c.dt = Some(1.25e-4);
        c.record_every = 8;
        let out = time_march(&gaussian(fine, 10.0, 0.5).unwrap(), &p, &c).unwrap();
        let mon = blowup_monitor(&out.record, &p, out.status.is_blown()).unwrap();
        (out, mon)
    };
    let (agg, agg_mon) = run(PressureSpec::exp_kernel_attractive());
    let (ctrl, ctrl_mon) = run(PressureSpec::exp_kernel());
    let monotone = agg_mon.integral.windows(2).all(|w| w[1] > w[0]);
    let blown_at = match &agg.status {
        RunStatus::Blown { time, .. } => *time,
        RunStatus::Completed => f64::NAN,
    };
    let pass = quad_err < 1e-12
        && additivity < 1e-12
        && stored_gap == 0.0
        && mon.status == MonitorStatus::Bounded
        && agg_mon.status == MonitorStatus::Blown
        && monotone
        && ctrl.status == RunStatus::Completed
        && ctrl_mon.status != MonitorStatus::Blown;
    report(
        11,
        "blowup monitor",
        pass,
        start.elapsed(),
        secs(120),
        format!(
            "quadrature {quad_err:.1e}, additivity {additivity:.1e} (< 1e-12); aggregation {} at t = {blown_at:.4} with integral {:.3e} rising monotonically: {monotone}; repulsive control {} ({})",
            agg_mon.status.label(),
            agg_mon.total(),
            ctrl.status.label(),
            ctrl_mon.status.label()
        ),
    );
}
