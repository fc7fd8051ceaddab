//! Circuit-to-circuit transformations with before/after metrics and an
//! equivalence check against the input.

mod brent;
mod disjoint;
mod homogenize;

use std::fmt::{self, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitMetrics};
use crate::error::{Error, Result};
use crate::eval::{estimate_terms, evaluate_dense, expand_outputs};
use crate::field::FieldElement;

pub use brent::{balance_formula, BALANCE_KAPPA};
pub use disjoint::make_mult_disjoint;
pub use homogenize::homogenize;

/// Largest expansion attempted when checking a transform exactly.
pub const VERIFY_TERM_BUDGET: u128 = 200_000;

/// How a transform's output was checked against its input.
#[derive(Clone, Debug, PartialEq)]
pub enum Verification {
    Exact,
    /// Random evaluations; `error_bound_log2` bounds the failure probability.
    Randomized { trials: u32, error_bound_log2: f64 },
}

#[derive(Clone, Debug)]
pub struct TransformReport {
    pub name: &'static str,
    pub input: CircuitMetrics,
    pub output: CircuitMetrics,
    pub verification: Verification,
}

impl TransformReport {
    pub fn size_ratio(&self) -> f64 {
        self.output.size as f64 / self.input.size.max(1) as f64
    }

    pub fn depth_ratio(&self) -> f64 {
        self.output.depth as f64 / self.input.depth.max(1) as f64
    }
}

impl fmt::Display for TransformReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "transform {}", self.name)?;
        writeln!(s, "input.size {}", self.input.size)?;
        writeln!(s, "input.depth {}", self.input.depth)?;
        writeln!(s, "input.degree {}", self.input.degree)?;
        writeln!(s, "output.size {}", self.output.size)?;
        writeln!(s, "output.depth {}", self.output.depth)?;
        writeln!(s, "output.degree {}", self.output.degree)?;
        writeln!(s, "size.ratio {:.3}", self.size_ratio())?;
        writeln!(s, "depth.ratio {:.3}", self.depth_ratio())?;
        match &self.verification {
            Verification::Exact => writeln!(s, "verified exact")?,
            Verification::Randomized { trials, error_bound_log2 } => {
                writeln!(s, "verified randomized trials={trials} error<=2^{error_bound_log2:.1}")?
            }
        }
        f.write_str(&s)
    }
}

fn max_estimate(c: &Circuit) -> u128 {
    let est = estimate_terms(c);
    c.outputs().iter().map(|&o| est[o]).max().unwrap_or(0)
}

/// Checks that `after` computes `before` (or, with `summed`, that the sum of
/// `after`'s outputs equals `before`'s single output). Exact when both fit
/// the expansion budget, otherwise by seeded random evaluation with failure
/// probability below 2^-40.
pub fn check_equivalent(before: &Circuit, after: &Circuit, summed: bool, seed: u64) -> Result<Verification> {
    let mismatch = || Error::Invalid("transform output differs from its input".into());
    if max_estimate(before) <= VERIFY_TERM_BUDGET && max_estimate(after) <= VERIFY_TERM_BUDGET {
        let want = expand_outputs(before, VERIFY_TERM_BUDGET)?;
        let got = expand_outputs(after, VERIFY_TERM_BUDGET)?;
        let ok = if summed {
            let total = got.iter().skip(1).fold(got[0].clone(), |acc, p| acc.add(p));
            want.len() == 1 && total == want[0]
        } else {
            want == got
        };
        return if ok { Ok(Verification::Exact) } else { Err(mismatch()) };
    }
    let field = before.field();
    let degree = before.metrics().degree.max(after.metrics().degree).max(1);
    let set = field.sample_set_size(1 << 40);
    let per_trial = (degree as f64 / set as f64).log2();
    if per_trial >= 0.0 {
        return Err(Error::FieldTooSmall { size: set, degree });
    }
    let trials = (40.0 / -per_trial).ceil() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = after.vars();
    for _ in 0..trials {
        let pt: Vec<FieldElement> = vars.iter().map(|_| field.sample(&mut rng, 1 << 40)).collect();
        let b_pt: Vec<FieldElement> = before
            .vars()
            .iter()
            .map(|v| vars.iter().position(|w| w == v).map(|i| pt[i].clone()).unwrap_or_else(|| field.sample(&mut rng, 1 << 40)))
            .collect();
        let want = evaluate_dense(before, &b_pt);
        let got = evaluate_dense(after, &pt);
        let ok = if summed {
            got.iter().fold(field.zero(), |acc, v| &acc + v) == want[0]
        } else {
            got == want
        };
        if !ok {
            return Err(mismatch());
        }
    }
    Ok(Verification::Randomized { trials, error_bound_log2: per_trial * trials as f64 })
}

pub(crate) fn report(name: &'static str, before: &Circuit, after: &Circuit, summed: bool) -> Result<TransformReport> {
    let verification = check_equivalent(before, after, summed, 0x5eed)?;
    Ok(TransformReport { name, input: before.metrics(), output: after.metrics(), verification })
}

/// Runs a transform by name and checks the result.
pub fn run_transform(name: &str, c: &Circuit, degree: Option<u64>) -> Result<(Circuit, TransformReport)> {
    let (out, name, summed) = match name {
        "homogenize" => {
            let d = degree.ok_or_else(|| Error::ParamOutOfRange("homogenize needs a degree bound".into()))?;
            (homogenize(c, d)?, "homogenize", true)
        }
        "mult-disjoint" => (make_mult_disjoint(c)?, "mult-disjoint", false),
        "balance" => (balance_formula(c)?, "balance", false),
        other => return Err(Error::ParamOutOfRange(format!("unknown transform `{other}`"))),
    };
    let r = report(name, c, &out, summed)?;
    Ok((out, r))
}
