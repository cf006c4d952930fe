//! Seeded sampling of bindings for numeric identity checks.
//!
//! Variables `t, x, v, a` are drawn uniformly from [−10, 10]; named constants
//! that are not fixed by the caller are drawn from [−5, 5].

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Bindings, Expr, ExprError, Var};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const VAR_RANGE: f64 = 10.0;
pub const CONST_RANGE: f64 = 5.0;

/// Extra draws allowed per requested sample when points land on poles.
const RETRY_FACTOR: usize = 10;

/// Sample count, tolerance, seed and pinned constant values shared by the
/// numeric checks.
#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub fixed: Bindings,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            samples: 1000,
            tol: 1e-9,
            seed: DEFAULT_SEED,
            fixed: Bindings::new(),
        }
    }
}

impl CheckOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_fixed(mut self, fixed: Bindings) -> Self {
        self.fixed = fixed;
        self
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    fixed: Bindings,
}

impl Sampler {
    pub fn new(seed: u64, fixed: &Bindings) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fixed: fixed.clone(),
        }
    }

    /// A fresh binding for all variables and for `constants`.
    pub fn draw(&mut self, constants: &BTreeSet<String>) -> Bindings {
        let mut b = Bindings::new();
        for var in Var::ALL {
            b.set_var(var, self.rng.gen_range(-VAR_RANGE..=VAR_RANGE));
        }
        for name in constants {
            let value = self.rng.gen_range(-CONST_RANGE..=CONST_RANGE);
            b.set(name, value);
        }
        b.extend(&self.fixed);
        b
    }
}

#[derive(Debug, Clone)]
pub struct MaxAbs {
    pub max_abs: f64,
    pub at: Option<Bindings>,
    pub evaluated: usize,
}

/// Largest |e| over `opts.samples` random bindings. Points where `e` hits a
/// pole are redrawn.
pub fn max_abs(e: &Expr, opts: &CheckOptions) -> Result<MaxAbs, ExprError> {
    let constants = e.constants();
    let mut sampler = Sampler::new(opts.seed, &opts.fixed);
    let mut out = MaxAbs {
        max_abs: 0.0,
        at: None,
        evaluated: 0,
    };
    for _ in 0..opts.samples * RETRY_FACTOR {
        if out.evaluated == opts.samples {
            break;
        }
        let b = sampler.draw(&constants);
        match e.eval(&b) {
            Ok(value) => {
                out.evaluated += 1;
                if value.abs() > out.max_abs || out.at.is_none() {
                    out.max_abs = value.abs();
                    out.at = Some(b);
                }
            }
            Err(ExprError::Domain(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

/// Structural zero after simplification, or numerically below `tol` on every
/// sampled point.
pub fn is_identically_zero(e: &Expr, opts: &CheckOptions) -> bool {
    let simplified = e.simplify();
    if simplified.is_zero() {
        return true;
    }
    match max_abs(&simplified, opts) {
        Ok(m) => m.evaluated > 0 && m.max_abs <= opts.tol,
        Err(_) => false,
    }
}
