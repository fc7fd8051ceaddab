//! Command-line front end. Every command reads and writes the crate's text
//! formats and is deterministic given its arguments and `--seed`.
//!
//! Exit codes: `0` success or a zero verdict, `1` a nonzero verdict or a
//! failed verification, `2` a domain error, `64` a usage error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::abp::{abp_to_skew_circuit, parse_abp, serialize_abp, weakly_skew_to_abp};
use crate::circuit::text::{parse_circuit, serialize_circuit};
use crate::circuit::Circuit;
use crate::det::{abp_to_det_projection, circuit_to_det_projection};
use crate::error::{Error, Result};
use crate::eval::{evaluate, expand_with_budget, DEFAULT_TERM_BUDGET};
use crate::families::{family_oracle, gen_family, FamilyName, FamilyParams};
use crate::field::{Field, FieldElement};
use crate::perm::valiant_sum_to_per;
use crate::pit::{equ_slp, equ_slp_general, grid_zero_test, pit_random, sdit_build, sdit_build_abp, sdit_decide, Verdict};
use crate::projection::{parse_projection, serialize_projection, VerifyMode};
use crate::transforms::run_transform;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NONZERO: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "valiant", version, about = "Arithmetic circuits, branching programs and determinant/permanent projections")]
pub struct Cli {
    /// `Q` or `Fp:<prime>`; used where no file supplies a field.
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of terms an exact expansion may produce.
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET)]
    pub budget_terms: u128,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TransformKind {
    Homogenize,
    Md,
    Balance,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReduceKind {
    Det,
    Per,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Size, depth, degree and structural flags.
    Stats { circuit: PathBuf },
    /// The polynomial computed by the first output.
    Expand {
        circuit: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Homogenize, make multiplicatively disjoint, or balance a formula.
    Transform {
        kind: TransformKind,
        circuit: PathBuf,
        /// Degree bound for `homogenize`.
        #[arg(short = 'd', long)]
        degree: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weakly-skew circuit to branching program.
    ToAbp {
        circuit: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Branching program to skew circuit.
    ToSkew {
        abp: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Determinant or permanent projection with a certified target.
    Reduce {
        kind: ReduceKind,
        input: PathBuf,
        /// Variables summed over {0,1} (permanent reduction).
        #[arg(long, value_delimiter = ',')]
        sum: Vec<String>,
        /// Size parameter `s` with formula size below `s`.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate at `name=value` assignments.
    Eval {
        circuit: PathBuf,
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
    },
    /// Randomized equivalence test of two circuits.
    Pit {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: u32,
    },
    /// Deterministic zero test on the grid {0..D}^k.
    Grid {
        circuit: PathBuf,
        #[arg(short = 'D', long = "degree")]
        degree: u64,
    },
    /// Exact zero test of a variable-free constant-free circuit.
    Equslp {
        circuit: PathBuf,
        /// Use the gate-by-gate magnitude bound, for circuits that are not
        /// multiplicatively disjoint.
        #[arg(long)]
        general: bool,
    },
    /// Symbolic determinant identity test of the pencil of an ABP or circuit.
    Sdit {
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: u32,
    },
    /// Generate a named family.
    Gen {
        family: String,
        n: usize,
        #[arg(short = 'd', long)]
        degree: Option<usize>,
        #[arg(short = 'q', long)]
        q: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check a projection file or a generated family.
    Verify {
        artifact: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: u32,
    },
}

pub fn parse_field(spec: &str) -> Result<Field> {
    match spec {
        "Q" => Ok(Field::rationals()),
        _ => {
            let p = spec
                .strip_prefix("Fp:")
                .and_then(|p| p.parse::<u64>().ok())
                .ok_or_else(|| Error::ParamOutOfRange(format!("field must be Q or Fp:<p>, got `{spec}`")))?;
            Field::prime(p)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&read(path)?)
}

fn first_token(text: &str) -> &str {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next())
        .unwrap_or("")
}

/// `family`, `params` and `field` lines embedded as `#` comments.
fn family_header(text: &str) -> Option<HashMap<String, String>> {
    let mut kv = HashMap::new();
    for line in text.lines() {
        let Some(body) = line.trim().strip_prefix('#') else { continue };
        if let Some((k, v)) = body.trim().split_once(' ') {
            kv.insert(k.to_string(), v.trim().to_string());
        }
    }
    kv.contains_key("family").then_some(kv)
}

fn parse_params(text: &str) -> Result<FamilyParams> {
    let mut p = FamilyParams { n: 0, d: None, q: None };
    for part in text.split_whitespace() {
        let bad = || Error::Invalid(format!("bad family parameter `{part}`"));
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        match k {
            "n" => p.n = v.parse().map_err(|_| bad())?,
            "d" => p.d = Some(v.parse().map_err(|_| bad())?),
            "q" => p.q = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok(p)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

fn commented(block: &str) -> String {
    block.lines().map(|l| format!("# {l}\n")).collect()
}

fn parse_assignment(field: Field, text: &str) -> Result<(String, FieldElement)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::Invalid(format!("expected name=value, got `{text}`")))?;
    Ok((k.trim().to_string(), field.parse_literal(v.trim())?))
}

fn stats(c: &Circuit) -> String {
    let m = c.metrics();
    let f = c.classify();
    let mut s = String::new();
    writeln!(s, "field {}", c.field()).unwrap();
    writeln!(s, "vars {}", c.vars().len()).unwrap();
    writeln!(s, "gates {}", c.len()).unwrap();
    writeln!(s, "size {}", m.size).unwrap();
    writeln!(s, "depth {}", m.depth).unwrap();
    writeln!(s, "degree {}", m.degree).unwrap();
    if let Some(cf) = m.constant_free_size {
        writeln!(s, "constant-free-size {cf}").unwrap();
    }
    writeln!(s, "formula {}", f.is_formula).unwrap();
    writeln!(s, "skew {}", f.is_skew).unwrap();
    writeln!(s, "weakly-skew {}", f.is_weakly_skew).unwrap();
    writeln!(s, "mult-disjoint {}", f.is_mult_disjoint).unwrap();
    writeln!(s, "constant-free {}", f.is_constant_free).unwrap();
    s
}

fn verify_family(cli: &Cli, text: &str, header: &HashMap<String, String>, out: &mut dyn Write) -> Result<i32> {
    let name: FamilyName = header["family"].parse()?;
    let params = parse_params(header.get("params").map_or("", String::as_str))?;
    let c = parse_circuit(text)?;
    let oracle = family_oracle(c.field(), name, params)?;
    let value = expand_with_budget(&c, cli.budget_terms)?;
    let passed = value == oracle;
    let mut s = String::new();
    writeln!(s, "artifact family {name}").unwrap();
    writeln!(s, "mode symbolic").unwrap();
    writeln!(s, "passed {passed}").unwrap();
    emit(out, None, &s)?;
    Ok(if passed { EXIT_OK } else { EXIT_NONZERO })
}

fn verify(cli: &Cli, path: &Path, trials: u32, out: &mut dyn Write) -> Result<i32> {
    let mut text = read(path)?;
    if first_token(&text) == "family" {
        let circuit_path = path.with_extension("");
        text = read(&circuit_path)?;
    }
    if let Some(header) = family_header(&text) {
        return verify_family(cli, &text, &header, out);
    }
    match first_token(&text) {
        "projection" => {
            let file = parse_projection(&text)?;
            let r = file.verify(cli.seed, trials)?;
            let mut s = String::new();
            writeln!(s, "artifact projection {}", file.projection.identity.name()).unwrap();
            match r.mode {
                VerifyMode::Symbolic => writeln!(s, "mode symbolic").unwrap(),
                VerifyMode::Randomized { trials } => writeln!(s, "mode randomized trials={trials}").unwrap(),
            }
            writeln!(s, "digest {}", if r.digest_ok { "ok" } else { "mismatch" }).unwrap();
            writeln!(s, "passed {}", r.passed).unwrap();
            if let Some(w) = &r.witness {
                let parts: Vec<String> = w.iter().map(|(v, x)| format!("{v}={x}")).collect();
                writeln!(s, "witness {}", parts.join(" ")).unwrap();
            }
            emit(out, None, &s)?;
            Ok(if r.passed { EXIT_OK } else { EXIT_NONZERO })
        }
        other => Err(Error::UnknownArtifactKind(other.to_string())),
    }
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Zero => EXIT_OK,
        Verdict::NonZero => EXIT_NONZERO,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Stats { circuit } => emit(out, None, &stats(&read_circuit(circuit)?))?,
        Command::Expand { circuit, output } => {
            let p = expand_with_budget(&read_circuit(circuit)?, cli.budget_terms)?;
            emit(out, output.as_deref(), &crate::poly::format_polynomial(&p))?;
        }
        Command::Transform { kind, circuit, degree, output } => {
            let name = match kind {
                TransformKind::Homogenize => "homogenize",
                TransformKind::Md => "mult-disjoint",
                TransformKind::Balance => "balance",
            };
            let (c, report) = run_transform(name, &read_circuit(circuit)?, *degree)?;
            let text = format!("{}{}", commented(&report.to_string()), serialize_circuit(&c));
            emit(out, output.as_deref(), &text)?;
        }
        Command::ToAbp { circuit, output } => {
            let a = weakly_skew_to_abp(&read_circuit(circuit)?)?;
            emit(out, output.as_deref(), &serialize_abp(&a))?;
        }
        Command::ToSkew { abp, output } => {
            let c = abp_to_skew_circuit(&parse_abp(&read(abp)?)?);
            emit(out, output.as_deref(), &serialize_circuit(&c))?;
        }
        Command::Reduce { kind, input, sum, bound, output } => {
            let text = read(input)?;
            let pm = match kind {
                ReduceKind::Det if first_token(&text) == "abp" => abp_to_det_projection(&parse_abp(&text)?),
                ReduceKind::Det => circuit_to_det_projection(&parse_circuit(&text)?)?,
                ReduceKind::Per => {
                    let g = parse_circuit(&text)?;
                    let s = bound.unwrap_or(g.size() + 1);
                    let summed: Vec<&str> = sum.iter().map(String::as_str).collect();
                    valiant_sum_to_per(&g, &summed, s)?.0
                }
            };
            emit(out, output.as_deref(), &serialize_projection(&pm))?;
        }
        Command::Eval { circuit, at } => {
            let c = read_circuit(circuit)?;
            let point = at.iter().map(|a| parse_assignment(c.field(), a)).collect::<Result<HashMap<_, _>>>()?;
            let vals = evaluate(&c, &point)?;
            let text: String = vals.iter().map(|v| format!("{v}\n")).collect();
            emit(out, None, &text)?;
        }
        Command::Pit { first, second, trials } => {
            let v = pit_random(&read_circuit(first)?, &read_circuit(second)?, *trials, cli.seed)?;
            emit(out, None, &v.to_string())?;
            return Ok(verdict_exit(v.verdict));
        }
        Command::Grid { circuit, degree } => {
            let v = grid_zero_test(&read_circuit(circuit)?, *degree)?;
            emit(out, None, &v.to_string())?;
            return Ok(verdict_exit(v.verdict));
        }
        Command::Equslp { circuit, general } => {
            let c = read_circuit(circuit)?;
            let v = if *general { equ_slp_general(&c)? } else { equ_slp(&c)? };
            emit(out, None, &format!("verdict {v}\nmethod crt\n"))?;
            return Ok(verdict_exit(v));
        }
        Command::Sdit { input, trials } => {
            let text = read(input)?;
            let inst = if first_token(&text) == "abp" {
                sdit_build_abp(&parse_abp(&text)?)
            } else {
                sdit_build(&parse_circuit(&text)?)?
            };
            let v = sdit_decide(&inst, *trials, cli.seed)?;
            let text = format!("side {}\nrelation {}\n{v}", inst.side(), inst.relation);
            emit(out, None, &text)?;
            return Ok(verdict_exit(v.verdict));
        }
        Command::Gen { family, n, degree, q, output } => {
            let field = parse_field(&cli.field)?;
            let name: FamilyName = family.parse()?;
            let d = gen_family(field, name, FamilyParams { n: *n, d: *degree, q: *q })?;
            let verified = d.verify()?;
            let meta = d.sidecar(verified);
            let text = format!("{}{}", commented(&meta), serialize_circuit(&d.construction));
            emit(out, output.as_deref(), &text)?;
            if let Some(p) = output {
                let mut side = p.clone().into_os_string();
                side.push(".meta");
                emit(out, Some(Path::new(&side)), &meta)?;
            }
            if verified == Some(false) {
                return Ok(EXIT_NONZERO);
            }
        }
        Command::Verify { artifact, trials } => return verify(cli, artifact, *trials, out),
    }
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
pub fn run_command<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::samples;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["valiant"];
        argv.extend(args);
        let code = run_command(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }

    #[test]
    fn usage_and_fields() {
        assert_eq!(run(&[]).0, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert!(parse_field("Fp:7").is_ok());
        assert!(parse_field("Fp:8").is_err());
        assert!(parse_field("R").is_err());
    }

    #[test]
    fn reduce_det_then_verify() {
        let dir = tempfile::tempdir().unwrap();
        let c = write(dir.path(), "f.circ", &serialize_circuit(&samples::xy_plus_z(Field::rationals())));
        let m = dir.path().join("f.proj");
        let (code, _, err) = run(&["reduce", "det", &c, "-o", m.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{err}");
        let (code, out, _) = run(&["verify", m.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("passed true"));
    }

    #[test]
    fn pit_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let f = Field::prime(101).unwrap();
        let a = write(dir.path(), "a.circ", &serialize_circuit(&samples::binomial_square(f)));
        let b = write(
            dir.path(),
            "b.circ",
            "field Fp 101\nvar x y\ng1 = input x\ng2 = input y\ng3 = mul g1 g1\ng4 = mul g2 g2\ng5 = mul g1 g2\ng6 = const 2\ng7 = mul g6 g5\ng8 = add g3 g4\ng9 = add g8 g7\noutput g9\n",
        );
        let c = write(dir.path(), "c.circ", "field Fp 101\nvar x\ng1 = input x\noutput g1\n");
        assert_eq!(run(&["pit", &a, &b]).0, EXIT_OK);
        assert_eq!(run(&["pit", &a, &c]).0, EXIT_NONZERO);
        assert_eq!(run(&["stats", "/nonexistent"]).0, EXIT_DOMAIN);
    }

    #[test]
    fn gen_expand_matches_oracle() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("per3.circ");
        let (code, _, _) = run(&["gen", "per", "3", "-o", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        let meta = std::fs::read_to_string(dir.path().join("per3.circ.meta")).unwrap();
        assert!(meta.contains("oracle-verified true"));
        let (_, expanded, _) = run(&["expand", p.to_str().unwrap()]);
        let oracle = family_oracle(Field::rationals(), FamilyName::Per, FamilyParams::n(3)).unwrap();
        assert_eq!(expanded, crate::poly::format_polynomial(&oracle));
        let (code, out, _) = run(&["verify", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{out}");
    }

    #[test]
    fn deterministic_output() {
        let dir = tempfile::tempdir().unwrap();
        let g = write(
            dir.path(),
            "g.circ",
            "field Fp 7\nvar x y1\ng1 = input x\ng2 = input y1\ng3 = mul g1 g2\noutput g3\n",
        );
        let a = run(&["--seed", "3", "reduce", "per", &g, "--sum", "y1", "--bound", "3"]);
        let b = run(&["--seed", "3", "reduce", "per", &g, "--sum", "y1", "--bound", "3"]);
        assert_eq!(a.0, EXIT_OK, "{}", a.2);
        assert_eq!(a.1, b.1);
        let pm = write(dir.path(), "g.proj", &a.1);
        assert_eq!(run(&["verify", &pm]).0, EXIT_OK);
    }
}
