//! Line-oriented state and operator files.
//!
//! Both formats are plain text with one record per line and explicit
//! re/im pairs printed at 17 significant digits, so a write/reload round
//! trip is bit-identical.
//!
//! State file:
//! ```text
//! # optional comments
//! dims 2 2
//! label bell
//! amp 7.0710678118654746e-1 0e0
//! amp 0e0 0e0
//! amp 0e0 0e0
//! amp 7.0710678118654746e-1 0e0
//! ```
//!
//! Operator file (`kind` one of density, measurement, unitary, kraus-list):
//! ```text
//! kind measurement
//! party_dims 2 2
//! entry <re> <im>   (row-major, D² lines)
//! ```
//! Kraus lists hold one `matrix` line before each operator's
//! `entry` block (d_out × d_in entries, row-major).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use prodtest_core::qma::{KrausChannel, Measurement};
use prodtest_core::tensor::{DensityOperator, DimsProfile, PureState};
use prodtest_core::unitary_test::UnitaryOperator;

/// Parse/validation failure with a line-number diagnostic.
#[derive(Debug)]
pub struct ParseError {
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        message: format!("line {line}: {}", message.into()),
    })
}

/// A parsed state file: dimension profile, amplitudes, optional label.
#[derive(Debug, Clone)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<Complex64>,
    pub label: Option<String>,
}

/// A parsed operator file.
#[derive(Debug, Clone)]
pub enum OperatorFile {
    Density(DensityOperator),
    Measurement(Measurement),
    Unitary(UnitaryOperator),
    KrausList(KrausChannel),
}

impl OperatorFile {
    pub fn kind(&self) -> &'static str {
        match self {
            OperatorFile::Density(_) => "density",
            OperatorFile::Measurement(_) => "measurement",
            OperatorFile::Unitary(_) => "unitary",
            OperatorFile::KrausList(_) => "kraus-list",
        }
    }
}

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_complex(line: usize, tokens: &[&str]) -> Result<Complex64, ParseError> {
    if tokens.len() != 2 {
        return err(line, "expected two fields: <re> <im>");
    }
    let re: f64 = tokens[0]
        .parse()
        .map_err(|e| ParseError {
            message: format!("line {line}: bad real part: {e}"),
        })?;
    let im: f64 = tokens[1]
        .parse()
        .map_err(|e| ParseError {
            message: format!("line {line}: bad imaginary part: {e}"),
        })?;
    Ok(Complex64::new(re, im))
}

fn parse_dims(line: usize, tokens: &[&str]) -> Result<Vec<usize>, ParseError> {
    if tokens.is_empty() {
        return err(line, "expected at least one dimension");
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<usize>().map_err(|e| ParseError {
                message: format!("line {line}: bad dimension '{t}': {e}"),
            })
        })
        .collect()
}

/// Parses a state file without norm renormalization policy applied.
pub fn parse_state(text: &str) -> Result<StateFile, ParseError> {
    let mut dims: Option<Vec<usize>> = None;
    let mut label: Option<String> = None;
    let mut amplitudes: Vec<Complex64> = Vec::new();
    for (line, content) in meaningful_lines(text) {
        let mut tokens = content.split_whitespace();
        let key = tokens.next().unwrap_or("");
        let rest: Vec<&str> = tokens.collect();
        match key {
            "dims" => {
                if dims.is_some() {
                    return err(line, "duplicate dims line");
                }
                dims = Some(parse_dims(line, &rest)?);
            }
            "label" => label = Some(rest.join(" ")),
            "amp" => amplitudes.push(parse_complex(line, &rest)?),
            other => return err(line, format!("unknown record '{other}'")),
        }
    }
    let Some(dims) = dims else {
        return err(0, "missing dims line");
    };
    let expected: usize = dims.iter().product();
    if amplitudes.len() != expected {
        return err(
            0,
            format!(
                "expected {expected} amplitudes for dims {dims:?}, found {}",
                amplitudes.len()
            ),
        );
    }
    Ok(StateFile {
        dims,
        amplitudes,
        label,
    })
}

/// Outcome of the norm policy applied on load.
pub enum NormPolicy {
    /// Within 1e-6 of 1: silently renormalized.
    Exact,
    /// Within 1e-3: renormalized, caller should warn.
    Renormalized { deviation: f64 },
}

/// Converts a parsed state file into a `PureState`, applying the norm policy:
/// deviations up to 1e-6 pass silently, up to 1e-3 renormalize with a
/// warning, larger ones are rejected.
pub fn realize_state(file: &StateFile) -> Result<(PureState, NormPolicy), ParseError> {
    let dims = DimsProfile::new(file.dims.clone()).map_err(|e| ParseError {
        message: e.to_string(),
    })?;
    let vector = DVector::from_vec(file.amplitudes.clone());
    let norm = vector.norm();
    let deviation = (norm - 1.0).abs();
    if deviation > 1e-3 {
        return Err(ParseError {
            message: format!("state norm {norm} deviates from 1 by {deviation} (limit 1e-3)"),
        });
    }
    let state = PureState::normalized(vector, dims).map_err(|e| ParseError {
        message: e.to_string(),
    })?;
    let policy = if deviation <= 1e-6 {
        NormPolicy::Exact
    } else {
        NormPolicy::Renormalized { deviation }
    };
    Ok((state, policy))
}

/// Serializes a state at full double precision.
pub fn write_state(state: &PureState, label: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("dims");
    for d in state.dims().local_dims() {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    if let Some(label) = label {
        out.push_str(&format!("label {label}\n"));
    }
    for amp in state.amplitudes().iter() {
        out.push_str(&format!("amp {:.16e} {:.16e}\n", amp.re, amp.im));
    }
    out
}

/// Parses and validates an operator file according to its `kind`.
pub fn parse_operator(text: &str) -> Result<OperatorFile, ParseError> {
    let mut kind: Option<String> = None;
    let mut party_dims: Option<Vec<usize>> = None;
    let mut blocks: Vec<Vec<Complex64>> = Vec::new();
    let mut in_kraus = false;
    for (line, content) in meaningful_lines(text) {
        let mut tokens = content.split_whitespace();
        let key = tokens.next().unwrap_or("");
        let rest: Vec<&str> = tokens.collect();
        match key {
            "kind" => {
                if rest.len() != 1 {
                    return err(line, "expected: kind <density|measurement|unitary|kraus-list>");
                }
                kind = Some(rest[0].to_string());
            }
            "party_dims" => party_dims = Some(parse_dims(line, &rest)?),
            "matrix" => {
                in_kraus = true;
                blocks.push(Vec::new());
            }
            "entry" => {
                if blocks.is_empty() {
                    blocks.push(Vec::new());
                }
                let value = parse_complex(line, &rest)?;
                blocks.last_mut().expect("nonempty").push(value);
            }
            other => return err(line, format!("unknown record '{other}'")),
        }
    }
    let Some(kind) = kind else {
        return err(0, "missing kind line");
    };
    let Some(party_dims) = party_dims else {
        return err(0, "missing party_dims line");
    };
    let total: usize = party_dims.iter().product();

    let as_square = |entries: &[Complex64]| -> Result<DMatrix<Complex64>, ParseError> {
        if entries.len() != total * total {
            return Err(ParseError {
                message: format!(
                    "expected {} entries for a {total}x{total} operator, found {}",
                    total * total,
                    entries.len()
                ),
            });
        }
        Ok(DMatrix::from_row_slice(total, total, entries))
    };
    let lift = |e: prodtest_core::Error| ParseError {
        message: e.to_string(),
    };

    match kind.as_str() {
        "density" => {
            if blocks.len() != 1 || in_kraus {
                return err(0, "a density file holds exactly one entry block");
            }
            let dims = DimsProfile::new(party_dims).map_err(lift)?;
            let rho = DensityOperator::new(as_square(&blocks[0])?, dims).map_err(lift)?;
            Ok(OperatorFile::Density(rho))
        }
        "measurement" => {
            if blocks.len() != 1 || in_kraus {
                return err(0, "a measurement file holds exactly one entry block");
            }
            let m = Measurement::new(as_square(&blocks[0])?, party_dims).map_err(lift)?;
            Ok(OperatorFile::Measurement(m))
        }
        "unitary" => {
            if blocks.len() != 1 || in_kraus {
                return err(0, "a unitary file holds exactly one entry block");
            }
            let d = party_dims[0];
            if party_dims.iter().any(|&x| x != d) {
                return err(0, "unitary files need uniform party dimensions");
            }
            let u = UnitaryOperator::new(as_square(&blocks[0])?, d, party_dims.len())
                .map_err(lift)?;
            Ok(OperatorFile::Unitary(u))
        }
        "kraus-list" => {
            if party_dims.len() != 2 {
                return err(0, "kraus-list party_dims must be <d_out> <d_in>");
            }
            if !in_kraus || blocks.is_empty() {
                return err(0, "kraus-list needs at least one matrix block");
            }
            let (d_out, d_in) = (party_dims[0], party_dims[1]);
            let ops = blocks
                .iter()
                .map(|entries| {
                    if entries.len() != d_out * d_in {
                        return Err(ParseError {
                            message: format!(
                                "each Kraus block needs {} entries, found {}",
                                d_out * d_in,
                                entries.len()
                            ),
                        });
                    }
                    Ok(DMatrix::from_row_slice(d_out, d_in, entries))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let channel = KrausChannel::new(ops).map_err(lift)?;
            Ok(OperatorFile::KrausList(channel))
        }
        other => err(0, format!("unknown kind '{other}'")),
    }
}

/// Serializes an operator file at full double precision.
pub fn write_operator(op: &OperatorFile) -> String {
    let mut out = String::new();
    out.push_str(&format!("kind {}\n", op.kind()));
    let dims_line = |dims: &[usize]| {
        let mut line = String::from("party_dims");
        for d in dims {
            line.push_str(&format!(" {d}"));
        }
        line.push('\n');
        line
    };
    let entries = |m: &DMatrix<Complex64>| {
        let mut text = String::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                text.push_str(&format!("entry {:.16e} {:.16e}\n", z.re, z.im));
            }
        }
        text
    };
    match op {
        OperatorFile::Density(rho) => {
            out.push_str(&dims_line(rho.dims().local_dims()));
            out.push_str(&entries(rho.matrix()));
        }
        OperatorFile::Measurement(m) => {
            out.push_str(&dims_line(m.party_dims()));
            out.push_str(&entries(m.matrix()));
        }
        OperatorFile::Unitary(u) => {
            out.push_str(&dims_line(&vec![u.local_dim(); u.sites()]));
            out.push_str(&entries(u.matrix()));
        }
        OperatorFile::KrausList(channel) => {
            out.push_str(&dims_line(&[channel.output_dim(), channel.input_dim()]));
            for op in channel.kraus_ops() {
                out.push_str("matrix\n");
                out.push_str(&entries(op));
            }
        }
    }
    out
}
