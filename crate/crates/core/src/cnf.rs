//! CNF formulas: variables, literals, DIMACS input/output and evaluation.

use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A propositional variable.
///
/// Stored 0-based; DIMACS numbering (1-based) is available through
/// [`Var::from_dimacs`] and [`Var::to_dimacs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Creates a variable from its 0-based index.
    #[inline]
    pub const fn from_index(index: usize) -> Var {
        Var(index as u32)
    }

    /// Creates a variable from its DIMACS number (1-based).
    ///
    /// # Panics
    /// Panics if `number` is zero.
    #[inline]
    pub fn from_dimacs(number: u32) -> Var {
        assert!(number > 0, "DIMACS variables are numbered from 1");
        Var(number - 1)
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn to_dimacs(self) -> u32 {
        self.0 + 1
    }

    #[inline]
    pub const fn lit(self, positive: bool) -> Lit {
        Lit((self.0 << 1) | (!positive) as u32)
    }

    #[inline]
    pub const fn positive(self) -> Lit {
        self.lit(true)
    }

    #[inline]
    pub const fn negative(self) -> Lit {
        self.lit(false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.to_dimacs())
    }
}

/// A literal: a variable together with a polarity.
///
/// Encoded as `2 * var + negated`, so a literal doubles as an index into
/// per-literal tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub const fn new(var: Var, positive: bool) -> Lit {
        var.lit(positive)
    }

    /// Parses a non-zero signed DIMACS integer.
    ///
    /// # Panics
    /// Panics if `value` is zero.
    #[inline]
    pub fn from_dimacs(value: i32) -> Lit {
        assert!(value != 0, "0 is the clause terminator, not a literal");
        Var::from_dimacs(value.unsigned_abs()).lit(value > 0)
    }

    #[inline]
    pub const fn to_dimacs(self) -> i32 {
        let v = self.var().to_dimacs() as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub const fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub const fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Position of this literal in a per-literal table.
    #[inline]
    pub const fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub const fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }
}

impl Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A formula rejected by [`Formula::new`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("clause {clause}: literal {lit} exceeds declared {num_vars} variables")]
    VariableOutOfRange {
        clause: usize,
        lit: i32,
        num_vars: usize,
    },
}

/// An immutable, normalized CNF formula.
///
/// Normalization removes repeated literals inside a clause (keeping the first
/// occurrence) and drops clauses that contain a literal and its negation.
/// Empty clauses are kept.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl Formula {
    /// Builds a normalized formula, checking every literal against `num_vars`.
    pub fn new<I, C>(num_vars: usize, clauses: I) -> Result<Formula, FormulaError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = Lit>,
    {
        let mut out = Vec::new();
        let mut mark = vec![0u32; 2 * num_vars];
        for (idx, clause) in clauses.into_iter().enumerate() {
            let stamp = idx as u32 + 1;
            let mut lits = Vec::new();
            let mut tautology = false;
            for lit in clause {
                if lit.var().index() >= num_vars {
                    return Err(FormulaError::VariableOutOfRange {
                        clause: idx,
                        lit: lit.to_dimacs(),
                        num_vars,
                    });
                }
                if mark[lit.code()] == stamp {
                    continue;
                }
                if mark[(!lit).code()] == stamp {
                    tautology = true;
                }
                mark[lit.code()] = stamp;
                lits.push(lit);
            }
            if !tautology {
                out.push(lits);
            }
        }
        Ok(Formula {
            num_vars,
            clauses: out,
        })
    }

    /// Convenience constructor from signed DIMACS integers.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[Vec<i32>]) -> Result<Formula, FormulaError> {
        Formula::new(
            num_vars,
            clauses
                .iter()
                .map(|c| c.iter().map(|&l| Lit::from_dimacs(l)).collect::<Vec<_>>()),
        )
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (0..self.num_vars).map(Var::from_index)
    }

    /// Clauses as signed DIMACS integers.
    pub fn to_dimacs_clauses(&self) -> Vec<Vec<i32>> {
        self.clauses
            .iter()
            .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
            .collect()
    }
}

/// A total assignment over the variables of a formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FullAssignment {
    values: Vec<bool>,
}

impl FullAssignment {
    pub fn new(values: Vec<bool>) -> FullAssignment {
        FullAssignment { values }
    }

    pub fn all_false(num_vars: usize) -> FullAssignment {
        FullAssignment {
            values: vec![false; num_vars],
        }
    }

    /// Bit `i` of `bits` is the value of variable `i` (0-based).
    pub fn from_bits(num_vars: usize, bits: u64) -> FullAssignment {
        FullAssignment {
            values: (0..num_vars).map(|i| (bits >> i) & 1 == 1).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    #[inline]
    pub fn set(&mut self, var: Var, value: bool) {
        self.values[var.index()] = value;
    }

    #[inline]
    pub fn flip(&mut self, var: Var) {
        self.values[var.index()] ^= true;
    }

    #[inline]
    pub fn satisfies(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    /// The assignment as a list of true literals, in variable order.
    pub fn literals(&self) -> impl Iterator<Item = Lit> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| Var::from_index(i).lit(v))
    }
}

/// Whether `assignment` satisfies every clause of `formula`.
///
/// # Panics
/// Panics if the assignment does not cover every variable of the formula.
pub fn evaluate(formula: &Formula, assignment: &FullAssignment) -> bool {
    assert!(
        assignment.len() >= formula.num_vars(),
        "assignment covers {} of {} variables",
        assignment.len(),
        formula.num_vars()
    );
    formula
        .clauses()
        .iter()
        .all(|clause| clause.iter().any(|&lit| assignment.satisfies(lit)))
}

/// Errors reported by [`parse_dimacs`], each tagged with a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: clause data before the \"p cnf\" header")]
    MissingHeader { line: usize },
    #[error("line {line}: literal {lit} exceeds declared {num_vars} variables")]
    VariableOutOfRange { line: usize, lit: i64, num_vars: usize },
    #[error("line {line}: invalid token {token:?}")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: final clause is not terminated by 0")]
    UnterminatedClause { line: usize },
    #[error("no \"p cnf\" header found")]
    NoHeader,
}

impl ParseError {
    /// Line the error was detected on, if any.
    pub fn line(&self) -> Option<usize> {
        match *self {
            ParseError::MalformedHeader { line, .. }
            | ParseError::MissingHeader { line }
            | ParseError::VariableOutOfRange { line, .. }
            | ParseError::InvalidToken { line, .. }
            | ParseError::UnterminatedClause { line } => Some(line),
            ParseError::NoHeader => None,
        }
    }
}

/// A parsed formula together with non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedCnf {
    pub formula: Formula,
    /// Clause count announced by the header.
    pub declared_clauses: usize,
    pub warnings: Vec<String>,
}

/// Parses a DIMACS CNF document.
///
/// Lines starting with `c` are comments. A line starting with `%` ends the
/// input (SATLIB files carry a trailing `%` / `0` pair). Clauses may span
/// lines. A header clause count that disagrees with the actual number of
/// clauses only produces a warning.
pub fn parse_dimacs(input: &[u8]) -> Result<ParsedCnf, ParseError> {
    let text = String::from_utf8_lossy(input);
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut current_start = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(ParseError::MalformedHeader {
                    line: line_no,
                    reason: "duplicate header".into(),
                });
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(ParseError::MissingHeader { line: line_no });
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(ParseError::VariableOutOfRange {
                    line: line_no,
                    lit: value,
                    num_vars,
                });
            }
            if current.is_empty() {
                current_start = line_no;
            }
            current.push(Lit::from_dimacs(value as i32));
        }
    }

    let Some((num_vars, declared)) = header else {
        return Err(ParseError::NoHeader);
    };
    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause { line: current_start });
    }
    let mut warnings = Vec::new();
    if clauses.len() != declared {
        warnings.push(format!(
            "header declares {declared} clauses but {} were read",
            clauses.len()
        ));
    }
    let formula = Formula::new(num_vars, clauses).expect("literal ranges are checked while parsing");
    Ok(ParsedCnf {
        formula,
        declared_clauses: declared,
        warnings,
    })
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize), ParseError> {
    let malformed = |reason: &str| ParseError::MalformedHeader {
        line: line_no,
        reason: reason.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "p" {
        return Err(malformed("expected \"p cnf <vars> <clauses>\""));
    }
    if fields[1] != "cnf" {
        return Err(malformed("format must be cnf"));
    }
    let vars = fields[2]
        .parse::<usize>()
        .map_err(|_| malformed("variable count is not a non-negative integer"))?;
    let clauses = fields[3]
        .parse::<usize>()
        .map_err(|_| malformed("clause count is not a non-negative integer"))?;
    if vars > (i32::MAX as usize) {
        return Err(malformed("variable count too large"));
    }
    Ok((vars, clauses))
}

/// Renders a formula in DIMACS CNF.
pub fn write_dimacs(formula: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.num_clauses());
    for clause in formula.clauses() {
        for lit in clause {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}
