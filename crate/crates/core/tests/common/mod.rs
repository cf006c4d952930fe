#![allow(dead_code)]

use gaugeforge::gauge::GaugeSet;
use gaugeforge::sampling::{self, CheckOptions};
use gaugeforge::{parse, Expr};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn p(text: &str) -> Expr {
    parse(text).unwrap()
}

/// `a` and `b` agree at 1000 sampled bindings to 1e-9.
pub fn same_function(a: &Expr, b: &Expr) -> bool {
    sampling::is_identically_zero(&(a.clone() - b.clone()), &CheckOptions::default())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coeff(rng: &mut ChaCha8Rng) -> f64 {
    // Three decimals keep the printed expressions readable.
    (rng.gen_range(-2.0..=2.0_f64) * 1000.0).round() / 1000.0
}

/// Polynomial of degree ≤ 3 in t, or a short sin/cos combination.
pub fn random_time_function(rng: &mut ChaCha8Rng) -> Expr {
    let text = match rng.gen_range(0..4) {
        0 => format!("{}", coeff(rng)),
        1 => {
            let degree = rng.gen_range(1..=3);
            (0..=degree)
                .map(|k| format!("({})*t^{k}", coeff(rng)))
                .collect::<Vec<_>>()
                .join(" + ")
        }
        2 => {
            let w = rng.gen_range(0.5..2.0_f64);
            format!("({})*sin({w}*t) + ({})*cos({w}*t)", coeff(rng), coeff(rng))
        }
        _ => format!(
            "({})*t*cos({}*t) + ({})*t^2",
            coeff(rng),
            rng.gen_range(0.5..2.0_f64),
            coeff(rng)
        ),
    };
    p(&text)
}

pub fn random_gauge(rng: &mut ChaCha8Rng) -> GaugeSet {
    GaugeSet::new(
        random_time_function(rng),
        random_time_function(rng),
        random_time_function(rng),
        random_time_function(rng),
    )
    .unwrap()
}

pub fn random_gauges(seed: u64, n: usize) -> Vec<GaugeSet> {
    let mut rng = rng(seed);
    (0..n).map(|_| random_gauge(&mut rng)).collect()
}

/// Smooth test path: position and velocity as functions of time.
pub struct Path {
    pub name: &'static str,
    pub x: fn(f64) -> f64,
    pub v: fn(f64) -> f64,
}

pub const PATHS: [Path; 5] = [
    Path {
        name: "sin",
        x: |t| t.sin(),
        v: |t| t.cos(),
    },
    Path {
        name: "quadratic",
        x: |t| 0.5 * t * t - t + 0.3,
        v: |t| t - 1.0,
    },
    Path {
        name: "exponential",
        x: |t| (0.3 * t).exp(),
        v: |t| 0.3 * (0.3 * t).exp(),
    },
    Path {
        name: "mixed",
        x: |t| (2.0 * t).cos() + t,
        v: |t| -2.0 * (2.0 * t).sin() + 1.0,
    },
    Path {
        name: "cubic",
        x: |t| 0.1 * t.powi(3),
        v: |t| 0.3 * t * t,
    },
];

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}
