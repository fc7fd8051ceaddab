//! Matrices certified to have a given determinant or permanent, their text
//! format, and re-verification against the oracles.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::circuit::text::{content_lines, field_line, parse_field_line};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::{bareiss_det, cycle_cover_det, permanent, sparse_per_symbolic, symbolic_det, Affine, SymMatrix};
use crate::poly::{format_polynomial, parse_polynomial, SparsePolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    Det,
    Per,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::Det => "det",
            Identity::Per => "per",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionMatrix {
    pub matrix: SymMatrix,
    pub identity: Identity,
    pub target: SparsePolynomial,
    /// Human-readable construction steps.
    pub trace: Vec<String>,
}

pub fn polynomial_digest(p: &SparsePolynomial) -> String {
    let p = p.trimmed();
    let mut names: Vec<String> = p.vars().to_vec();
    names.sort();
    let p = p.with_vars(&crate::poly::var_list(&names)).expect("same variables");
    hex::encode(Sha256::digest(format_polynomial(&p).as_bytes()))
}

impl ProjectionMatrix {
    pub fn side(&self) -> usize {
        self.matrix.side()
    }

    /// Every entry is a constant or a single variable with coefficient one.
    pub fn is_strict_projection(&self) -> bool {
        self.matrix.is_projection()
    }

    pub fn diagonal_is_zero_one(&self) -> bool {
        (0..self.side()).all(|i| {
            let a = self.matrix.get(i, i);
            a.is_constant() && (a.constant.is_zero() || a.constant.is_one())
        })
    }

    /// Exact determinant or permanent of the matrix.
    pub fn evaluate_symbolic(&self) -> Result<SparsePolynomial> {
        match self.identity {
            Identity::Det => symbolic_det(&self.matrix),
            Identity::Per => sparse_per_symbolic(&self.matrix),
        }
    }

    pub fn evaluate_at(&self, point: &HashMap<String, FieldElement>) -> Result<FieldElement> {
        let m = self.matrix.eval(point)?;
        let field = self.matrix.field();
        match self.identity {
            Identity::Det => Ok(bareiss_det(field, &m)),
            Identity::Per => permanent(field, &m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Symbolic,
    Randomized { trials: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub passed: bool,
    pub mode: VerifyMode,
    pub digest_ok: bool,
    /// A point where the two sides differ, when one was found.
    pub witness: Option<Vec<(String, FieldElement)>>,
}

fn all_vars(pm: &ProjectionMatrix) -> Vec<String> {
    let mut vars = pm.matrix.variables();
    for v in pm.target.vars().iter() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars
}

fn random_point(field: Field, vars: &[String], rng: &mut ChaCha8Rng) -> HashMap<String, FieldElement> {
    vars.iter().map(|v| (v.clone(), field.sample(rng, 1 << 20))).collect()
}

fn sorted_point(point: HashMap<String, FieldElement>) -> Vec<(String, FieldElement)> {
    let mut w: Vec<_> = point.into_iter().collect();
    w.sort_by(|a, b| a.0.cmp(&b.0));
    w
}

/// Re-checks the certified identity: symbolically when the matrix is small,
/// otherwise at `trials` seeded random points.
pub fn verify_projection(pm: &ProjectionMatrix, seed: u64, trials: u32) -> Result<VerifyReport> {
    verify_projection_with_digest(pm, None, seed, trials)
}

fn verify_projection_with_digest(
    pm: &ProjectionMatrix,
    digest: Option<&str>,
    seed: u64,
    trials: u32,
) -> Result<VerifyReport> {
    let digest_ok = digest.is_none_or(|d| d == polynomial_digest(&pm.target));
    let field = pm.matrix.field();
    let vars = all_vars(pm);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbolic = match pm.identity {
        Identity::Det if pm.side() <= 8 => Some(cycle_cover_det(&pm.matrix)),
        Identity::Per if pm.side() <= 12 => Some(sparse_per_symbolic(&pm.matrix)),
        _ => None,
    };
    if let Some(Ok(value)) = symbolic {
        let passed = value == pm.target;
        let mut witness = None;
        if !passed {
            let diff = value.sub(&pm.target);
            for _ in 0..64 {
                let pt = random_point(field, &vars, &mut rng);
                if !diff.eval(&pt)?.is_zero() {
                    witness = Some(sorted_point(pt));
                    break;
                }
            }
        }
        return Ok(VerifyReport { passed: passed && digest_ok, mode: VerifyMode::Symbolic, digest_ok, witness });
    }
    for _ in 0..trials {
        let pt = random_point(field, &vars, &mut rng);
        let lhs = pm.evaluate_at(&pt)?;
        let rhs = pm.target.eval(&pt)?;
        if lhs != rhs {
            return Ok(VerifyReport {
                passed: false,
                mode: VerifyMode::Randomized { trials },
                digest_ok,
                witness: Some(sorted_point(pt)),
            });
        }
    }
    Ok(VerifyReport { passed: digest_ok, mode: VerifyMode::Randomized { trials }, digest_ok, witness: None })
}

pub fn serialize_projection(pm: &ProjectionMatrix) -> String {
    let mut out = String::from("projection\n");
    writeln!(out, "{}", field_line(pm.matrix.field())).unwrap();
    writeln!(out, "identity {}", pm.identity.name()).unwrap();
    writeln!(out, "target-sha256 {}", polynomial_digest(&pm.target)).unwrap();
    out.push_str("target\n");
    out.push_str(&format_polynomial(&pm.target));
    out.push_str("end\n");
    writeln!(out, "matrix {}", pm.side()).unwrap();
    for row in pm.matrix.rows() {
        let cells: Vec<String> = row.iter().map(|a| a.to_string()).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    for t in &pm.trace {
        writeln!(out, "trace {}", t.replace('\n', " ")).unwrap();
    }
    out
}

/// Parsed artifact plus the digest recorded in the file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionFile {
    pub projection: ProjectionMatrix,
    pub recorded_digest: String,
}

impl ProjectionFile {
    pub fn verify(&self, seed: u64, trials: u32) -> Result<VerifyReport> {
        verify_projection_with_digest(&self.projection, Some(&self.recorded_digest), seed, trials)
    }
}

pub fn parse_projection(text: &str) -> Result<ProjectionFile> {
    let lines: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    let syntax = |line: usize, m: &str| Error::Syntax { line, message: m.to_string() };
    let mut it = lines.into_iter().peekable();
    match it.next() {
        Some((_, t)) if t == ["projection"] => {}
        Some((_, t)) => return Err(Error::UnknownArtifactKind(t[0].to_string())),
        None => return Err(Error::UnknownArtifactKind(String::new())),
    }
    let mut field = None;
    let mut identity = None;
    let mut digest = None;
    let mut target = None;
    let mut rows: Vec<Vec<Affine>> = Vec::new();
    let mut side = None;
    let mut trace = Vec::new();
    while let Some((line, toks)) = it.next() {
        match toks.as_slice() {
            ["field", rest @ ..] => field = Some(parse_field_line(rest, line)?),
            ["identity", "det"] => identity = Some(Identity::Det),
            ["identity", "per"] => identity = Some(Identity::Per),
            ["target-sha256", h] => digest = Some(h.to_string()),
            ["target"] => {
                let f = field.ok_or_else(|| syntax(line, "target before field"))?;
                let mut body = String::new();
                loop {
                    match it.next() {
                        Some((_, t)) if t == ["end"] => break,
                        Some((_, t)) => {
                            body.push_str(&t.join(" "));
                            body.push('\n');
                        }
                        None => return Err(syntax(line, "unterminated target block")),
                    }
                }
                target = Some(parse_polynomial(&body, f)?);
            }
            ["matrix", n] => {
                let f = field.ok_or_else(|| syntax(line, "matrix before field"))?;
                let n: usize = n.parse().map_err(|_| syntax(line, "bad matrix side"))?;
                side = Some(n);
                for _ in 0..n {
                    let (l, cells) = it.next().ok_or_else(|| syntax(line, "missing matrix row"))?;
                    if cells.len() != n {
                        return Err(syntax(l, "row length differs from matrix side"));
                    }
                    rows.push(cells.iter().map(|c| Affine::parse(c, f)).collect::<Result<_>>()?);
                }
            }
            ["trace", ..] => trace.push(toks[1..].join(" ")),
            _ => return Err(syntax(line, "unrecognized line")),
        }
    }
    let field = field.ok_or_else(|| syntax(0, "missing field"))?;
    let identity = identity.ok_or_else(|| syntax(0, "missing identity"))?;
    let target = target.ok_or_else(|| syntax(0, "missing target"))?;
    side.ok_or_else(|| syntax(0, "missing matrix"))?;
    let matrix = SymMatrix::new(field, rows)?;
    Ok(ProjectionFile {
        recorded_digest: digest.unwrap_or_else(|| polynomial_digest(&target)),
        projection: ProjectionMatrix { matrix, identity, target, trace },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ProjectionMatrix {
        let f = Field::rationals();
        let m = SymMatrix::new(
            f,
            vec![vec![Affine::var(f, "a"), Affine::var(f, "b").neg()], vec![Affine::var(f, "c"), Affine::var(f, "d")]],
        )
        .unwrap();
        let target = parse_polynomial("a * d\nb * c", f).unwrap();
        ProjectionMatrix { matrix: m, identity: Identity::Det, target, trace: vec!["sign trick".into()] }
    }

    #[test]
    fn round_trip_and_verify() {
        let pm = sample();
        let text = serialize_projection(&pm);
        let parsed = parse_projection(&text).unwrap();
        assert_eq!(parsed.projection.matrix, pm.matrix);
        assert_eq!(parsed.projection.target, pm.target);
        let r = parsed.verify(1, 10).unwrap();
        assert!(r.passed);
        assert_eq!(r.mode, VerifyMode::Symbolic);
    }

    #[test]
    fn tampering_is_detected_with_a_point() {
        let text = serialize_projection(&sample()).replace("-b", "b");
        let r = parse_projection(&text).unwrap().verify(1, 10).unwrap();
        assert!(!r.passed);
        assert!(r.witness.is_some());
    }

    #[test]
    fn wrong_kind() {
        assert!(matches!(parse_projection("abp\n"), Err(Error::UnknownArtifactKind(_))));
    }
}
