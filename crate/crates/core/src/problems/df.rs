//! Objective functions of the DF1–DF14 suite (CEC2018 dynamic multiobjective
//! optimisation competition, Jiang, Yang, Yao, Tan, Kaiser and Krasnogor).
//!
//! Each function follows the competition's technical definition. `x` is
//! 0-indexed here, so the report's `x_1` is `x[0]` and the report's sums
//! `Σ_{i=2}^{n}` run over `x[1..]`. Objective values are always minimized.

use std::f64::consts::PI;

use super::DfId;

#[inline]
fn half_pi_sin(t: f64) -> f64 {
    (0.5 * PI * t).sin()
}

/// `g` shared by the problems whose distance variables all target one value.
fn g_shift(tail: &[f64], target: f64) -> f64 {
    1.0 + tail.iter().map(|v| (v - target) * (v - target)).sum::<f64>()
}

/// Writes the objectives of `id` at `(x, t)` into `out`.
pub(super) fn evaluate(id: DfId, x: &[f64], t: f64, out: &mut Vec<f64>) {
    out.clear();
    let n = x.len();
    match id {
        // G = |sin(0.5πt)|, H = 0.75 sin(0.5πt) + 1.25
        // g = 1 + Σ (x_i − G)², f1 = x1, f2 = g (1 − (x1/g)^H)
        DfId::Df1 => {
            let v = half_pi_sin(t);
            let big_g = v.abs();
            let h = 0.75 * v + 1.25;
            let g = g_shift(&x[1..], big_g);
            out.push(x[0]);
            out.push(g * (1.0 - (x[0] / g).powf(h)));
        }
        // G = |sin(0.5πt)|, r = 1 + ⌊(n−1) G⌋ (position variable index)
        // g = 1 + Σ_{i≠r} (x_i − G)², f1 = x_r, f2 = g (1 − √(x_r/g))
        DfId::Df2 => {
            let big_g = half_pi_sin(t).abs();
            let r = df2_position_index(n, t);
            let g = 1.0
                + x.iter().enumerate().filter(|(i, _)| *i != r).map(|(_, v)| (v - big_g) * (v - big_g)).sum::<f64>();
            out.push(x[r]);
            out.push(g * (1.0 - (x[r] / g).sqrt()));
        }
        // G = sin(0.5πt), H = G + 1.5
        // g = 1 + Σ (x_i − G − x1^H)², f1 = x1, f2 = g (1 − (x1/g)^H)
        DfId::Df3 => {
            let big_g = half_pi_sin(t);
            let h = big_g + 1.5;
            let g = g_shift(&x[1..], big_g + x[0].powf(h));
            out.push(x[0]);
            out.push(g * (1.0 - (x[0] / g).powf(h)));
        }
        // a = sin(0.5πt), b = 1 + |cos(0.5πt)|, c = max(|a|, a + b), H = 1.5 + a
        // g = 1 + Σ_{i=2}^{n} (x_i − a (x1/c)² / i)²
        // f1 = g |x1 − a|^H, f2 = g |x1 − a − b|^H
        DfId::Df4 => {
            let (a, b, c, h) = df4_params(t);
            let g = 1.0
                + x.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, v)| {
                        let d = v - a * (x[0] / c).powi(2) / (i + 1) as f64;
                        d * d
                    })
                    .sum::<f64>();
            out.push(g * (x[0] - a).abs().powf(h));
            out.push(g * (x[0] - a - b).abs().powf(h));
        }
        // G = sin(0.5πt), w = ⌊10 G⌋, g = 1 + Σ (x_i − G)²
        // f1 = g (x1 + 0.02 sin(wπ x1)), f2 = g (1 − x1 + 0.02 sin(wπ x1))
        DfId::Df5 => {
            let big_g = half_pi_sin(t);
            let w = (10.0 * big_g).floor();
            let g = g_shift(&x[1..], big_g);
            let s = 0.02 * (w * PI * x[0]).sin();
            out.push(g * (x[0] + s));
            out.push(g * (1.0 - x[0] + s));
        }
        // G = sin(0.5πt), a = 0.2 + 2.8 |G|, y_i = x_i − G
        // g = 1 + Σ (|G| y_i² − 10 cos(2π y_i) + 10)
        // f1 = g (x1 + 0.1 sin(3π x1))^a, f2 = g (1 − x1 + 0.1 sin(3π x1))^a
        DfId::Df6 => {
            let big_g = half_pi_sin(t);
            let a = 0.2 + 2.8 * big_g.abs();
            let g = 1.0
                + x[1..]
                    .iter()
                    .map(|v| {
                        let y = v - big_g;
                        big_g.abs() * y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
                    })
                    .sum::<f64>();
            let s = 0.1 * (3.0 * PI * x[0]).sin();
            out.push(g * (x[0] + s).max(0.0).powf(a));
            out.push(g * (1.0 - x[0] + s).max(0.0).powf(a));
        }
        // a = 5 cos(0.5πt), g = 1 + Σ (x_i − 1/(1 + e^{a (x1 − 2.5)}))²
        // f1 = g (1 + t) / x1, f2 = g x1 / (1 + t)
        DfId::Df7 => {
            let a = 5.0 * (0.5 * PI * t).cos();
            let target = 1.0 / (1.0 + (a * (x[0] - 2.5)).exp());
            let g = g_shift(&x[1..], target);
            out.push(g * (1.0 + t) / x[0]);
            out.push(g * x[0] / (1.0 + t));
        }
        // G = sin(0.5πt), a = 2.25 + 2 cos(2πt), b = 100 G²
        // g = 1 + Σ (x_i − G sin(4π x1^b) / (1 + |G|))²
        // f1 = g (x1 + 0.1 sin(3π x1)), f2 = g (1 − x1 + 0.1 sin(3π x1))^a
        DfId::Df8 => {
            let big_g = half_pi_sin(t);
            let a = 2.25 + 2.0 * (2.0 * PI * t).cos();
            let b = 100.0 * big_g * big_g;
            let target = big_g * (4.0 * PI * x[0].powf(b)).sin() / (1.0 + big_g.abs());
            let g = g_shift(&x[1..], target);
            let s = 0.1 * (3.0 * PI * x[0]).sin();
            out.push(g * (x[0] + s));
            out.push(g * (1.0 - x[0] + s).max(0.0).powf(a));
        }
        // N = 1 + ⌊10 |sin(0.5πt)|⌋
        // g = 1 + Σ_{i=2}^{n} (x_i − cos(4t + x1 + x_{i−1}))²
        // f1 = g (x1 + max(0, (0.1 + 1/(2N)) sin(2Nπ x1)))
        // f2 = g (1 − x1 + max(0, (0.1 + 1/(2N)) sin(2Nπ x1)))
        DfId::Df9 => {
            let segments = 1.0 + (10.0 * half_pi_sin(t).abs()).floor();
            let g = 1.0
                + (1..n)
                    .map(|i| {
                        let d = x[i] - (4.0 * t + x[0] + x[i - 1]).cos();
                        d * d
                    })
                    .sum::<f64>();
            let bump = ((0.1 + 0.5 / segments) * (2.0 * segments * PI * x[0]).sin()).max(0.0);
            out.push(g * (x[0] + bump));
            out.push(g * (1.0 - x[0] + bump));
        }
        // G = sin(0.5πt), H = 2.25 + 2 cos(0.5πt)
        // g = 1 + Σ_{i=3}^{n} (x_i − sin(2π(x1 + x2)) / (1 + |G|))²
        // f1 = g sin(0.5π x1)^H
        // f2 = g (sin(0.5π x2) cos(0.5π x1))^H
        // f3 = g (cos(0.5π x2) cos(0.5π x1))^H
        DfId::Df10 => {
            let big_g = half_pi_sin(t);
            let h = 2.25 + 2.0 * (0.5 * PI * t).cos();
            let target = (2.0 * PI * (x[0] + x[1])).sin() / (1.0 + big_g.abs());
            let g = g_shift(&x[2..], target);
            let (s1, c1) = (0.5 * PI * x[0]).sin_cos();
            let (s2, c2) = (0.5 * PI * x[1]).sin_cos();
            out.push(g * s1.max(0.0).powf(h));
            out.push(g * (s2 * c1).max(0.0).powf(h));
            out.push(g * (c2 * c1).max(0.0).powf(h));
        }
        // G = |sin(0.5πt)|, g = 1 + G + Σ_{i=3}^{n} (x_i − 0.5 G x1)²
        // y_j = πG/6 + (π/2 − πG/3) x_j  (j = 1, 2)
        // f1 = g sin(y1), f2 = g sin(y2) cos(y1), f3 = g cos(y2) cos(y1)
        DfId::Df11 => {
            let big_g = half_pi_sin(t).abs();
            let g = big_g + g_shift(&x[2..], 0.5 * big_g * x[0]);
            let angle = |v: f64| PI * big_g / 6.0 + (0.5 * PI - PI * big_g / 3.0) * v;
            let (y1, y2) = (angle(x[0]), angle(x[1]));
            out.push(g * y1.sin());
            out.push(g * y2.sin() * y1.cos());
            out.push(g * y2.cos() * y1.cos());
        }
        // k = 10 sin(πt)
        // g = 1 + Σ_{i=3}^{n} (x_i − sin(t x1))² + |sin(⌊k(2x1 − 1)⌋ π/2) sin(⌊k(2x2 − 1)⌋ π/2)|
        // f1 = g cos(0.5π x2) cos(0.5π x1)
        // f2 = g sin(0.5π x2) cos(0.5π x1)
        // f3 = g sin(0.5π x1)
        DfId::Df12 => {
            let g = g_shift(&x[2..], (t * x[0]).sin()) + df12_hole(x[0], x[1], t);
            let (s1, c1) = (0.5 * PI * x[0]).sin_cos();
            let (s2, c2) = (0.5 * PI * x[1]).sin_cos();
            out.push(g * c2 * c1);
            out.push(g * s2 * c1);
            out.push(g * s1);
        }
        // G = sin(0.5πt), p = ⌊6 G⌋, g = 1 + Σ_{i=3}^{n} (x_i − G)²
        // f1 = g cos²(0.5π x1), f2 = g cos²(0.5π x2)
        // f3 = g (sin²(0.5π x1) + sin(0.5π x1) cos²(pπ x1)
        //         + sin²(0.5π x2) + sin(0.5π x2) cos²(pπ x2))
        DfId::Df13 => {
            let big_g = half_pi_sin(t);
            let p = (6.0 * big_g).floor();
            let g = g_shift(&x[2..], big_g);
            let (s1, c1) = (0.5 * PI * x[0]).sin_cos();
            let (s2, c2) = (0.5 * PI * x[1]).sin_cos();
            let k1 = (p * PI * x[0]).cos();
            let k2 = (p * PI * x[1]).cos();
            out.push(g * c1 * c1);
            out.push(g * c2 * c2);
            out.push(g * (s1 * s1 + s1 * k1 * k1 + s2 * s2 + s2 * k2 * k2));
        }
        // G = sin(0.5πt), g = 1 + Σ_{i=3}^{n} (x_i − G)², y = 0.5 + G (x1 − 0.5)
        // f1 = g (1 − y + 0.05 sin(6πy))
        // f2 = g (1 − x2 + 0.05 sin(6π x2)) (y + 0.05 sin(6πy))
        // f3 = g (x2 + 0.05 sin(6π x2)) (y + 0.05 sin(6πy))
        DfId::Df14 => {
            let big_g = half_pi_sin(t);
            let g = g_shift(&x[2..], big_g);
            let y = 0.5 + big_g * (x[0] - 0.5);
            let sy = 0.05 * (6.0 * PI * y).sin();
            let s2 = 0.05 * (6.0 * PI * x[1]).sin();
            out.push(g * (1.0 - y + sy));
            out.push(g * (1.0 - x[1] + s2) * (y + sy));
            out.push(g * (x[1] + s2) * (y + sy));
        }
    }
}

/// 0-based index of DF2's position variable at time `t`.
pub(super) fn df2_position_index(n: usize, t: f64) -> usize {
    let big_g = half_pi_sin(t).abs();
    (((n - 1) as f64) * big_g).floor().min((n - 1) as f64) as usize
}

/// `(a, b, c, H)` of DF4 at time `t`.
pub(super) fn df4_params(t: f64) -> (f64, f64, f64, f64) {
    let a = half_pi_sin(t);
    let b = 1.0 + (0.5 * PI * t).cos().abs();
    let c = a.abs().max(a + b);
    (a, b, c, 1.5 + a)
}

/// DF12's hole indicator term: 0 on the front, 1 inside a hole.
pub(super) fn df12_hole(x1: f64, x2: f64, t: f64) -> f64 {
    let k = 10.0 * (PI * t).sin();
    let s1 = ((k * (2.0 * x1 - 1.0)).floor() * 0.5 * PI).sin();
    let s2 = ((k * (2.0 * x2 - 1.0)).floor() * 0.5 * PI).sin();
    (s1 * s2).abs()
}

/// A decision vector on the optimal manifold of `id` at time `t`, addressed by
/// position parameters in `[0, 1]` (one for bi-objective problems, two for
/// tri-objective ones). Evaluating it attains the minimal `g` of the problem.
pub(super) fn optimal_point(id: DfId, n: usize, t: f64, pos: &[f64], upper0: f64) -> Vec<f64> {
    let s = pos[0];
    let mut x = vec![0.0; n];
    match id {
        DfId::Df1 | DfId::Df5 => {
            let big_g = if id == DfId::Df1 { half_pi_sin(t).abs() } else { half_pi_sin(t) };
            x[0] = s;
            x[1..].fill(big_g);
        }
        DfId::Df2 => {
            let big_g = half_pi_sin(t).abs();
            x.fill(big_g);
            x[df2_position_index(n, t)] = s;
        }
        DfId::Df3 => {
            let big_g = half_pi_sin(t);
            x[0] = s;
            let target = big_g + s.powf(big_g + 1.5);
            x[1..].fill(target);
        }
        DfId::Df4 => {
            let (a, b, c, _) = df4_params(t);
            // The optimal x1 range [a, a + b] can exceed the box; keep the reachable part.
            x[0] = a + s * (b.min(upper0 - a));
            let lead = a * (x[0] / c).powi(2);
            for (i, v) in x.iter_mut().enumerate().skip(1) {
                *v = lead / (i + 1) as f64;
            }
        }
        DfId::Df6 => {
            x[0] = s;
            x[1..].fill(half_pi_sin(t));
        }
        DfId::Df7 => {
            x[0] = 1.0 + 3.0 * s;
            let a = 5.0 * (0.5 * PI * t).cos();
            let target = 1.0 / (1.0 + (a * (x[0] - 2.5)).exp());
            x[1..].fill(target);
        }
        DfId::Df8 => {
            let big_g = half_pi_sin(t);
            let b = 100.0 * big_g * big_g;
            x[0] = s;
            x[1..].fill(big_g * (4.0 * PI * s.powf(b)).sin() / (1.0 + big_g.abs()));
        }
        DfId::Df9 => {
            x[0] = s;
            for i in 1..n {
                x[i] = (4.0 * t + x[0] + x[i - 1]).cos();
            }
        }
        DfId::Df10 => {
            let big_g = half_pi_sin(t);
            x[0] = s;
            x[1] = pos[1];
            let target = (2.0 * PI * (s + pos[1])).sin() / (1.0 + big_g.abs());
            x[2..].fill(target);
        }
        DfId::Df11 => {
            let big_g = half_pi_sin(t).abs();
            x[0] = s;
            x[1] = pos[1];
            x[2..].fill(0.5 * big_g * s);
        }
        DfId::Df12 => {
            x[0] = s;
            x[1] = pos[1];
            x[2..].fill((t * s).sin());
        }
        DfId::Df13 | DfId::Df14 => {
            x[0] = s;
            x[1] = pos[1];
            x[2..].fill(half_pi_sin(t));
        }
    }
    x
}
