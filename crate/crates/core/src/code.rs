//! Codewords, codes, and the code text format.
//!
//! ```text
//! # comments run to end of line
//! code N=4 m=2 t=1 d=2 name="example-1"
//! word 0
//! + 1/2 : 0 4
//! + 1/2 : 4 0
//! word 1
//! + 1/1 : 2 2
//! ```

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{parse_rational, RadicalSum, Rational};
use crate::channel::PureState;
use crate::error::{Error, Result};
use crate::fock::{l1_distance, OccupationVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// One QCS of a codeword with weight `mu` and amplitude `sign·√mu`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub mu: Rational,
    pub sign: Sign,
    pub qcs: OccupationVector,
}

impl Row {
    pub fn new(mu: Rational, sign: Sign, qcs: impl Into<OccupationVector>) -> Self {
        Self { mu, sign, qcs: qcs.into() }
    }

    pub fn amplitude(&self) -> Result<RadicalSum> {
        let a = RadicalSum::sqrt(&self.mu)?;
        Ok(match self.sign {
            Sign::Plus => a,
            Sign::Minus => -a,
        })
    }
}

/// Normalized superposition of distinct QCS; rows are kept sorted by QCS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    rows: Vec<Row>,
}

impl Codeword {
    /// Validates weights (positive, summing to 1) and distinctness. `index`
    /// only labels errors.
    pub fn new(index: usize, mut rows: Vec<Row>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyCodeword(index));
        }
        rows.sort_by(|a, b| a.qcs.cmp(&b.qcs));
        for w in rows.windows(2) {
            if w[0].qcs == w[1].qcs {
                return Err(Error::DuplicateQcs { codeword: index, qcs: w[0].qcs.clone() });
            }
        }
        let m = rows[0].qcs.modes();
        if let Some(r) = rows.iter().find(|r| r.qcs.modes() != m) {
            return Err(Error::LengthMismatch { left: m, right: r.qcs.modes() });
        }
        if let Some(r) = rows.iter().find(|r| !r.mu.is_positive()) {
            return Err(Error::NonPositiveWeight { codeword: index, weight: r.mu.to_string() });
        }
        let sum: Rational = rows.iter().map(|r| &r.mu).sum();
        if !sum.is_one() {
            return Err(Error::Normalization { codeword: index, sum: sum.to_string() });
        }
        Ok(Self { rows })
    }

    /// Equal-weight codeword over the given QCS.
    pub fn uniform(index: usize, qcs: impl IntoIterator<Item = OccupationVector>) -> Result<Self> {
        let qcs: Vec<_> = qcs.into_iter().collect();
        let mu = Rational::new(BigInt::one(), BigInt::from(qcs.len().max(1)));
        Self::new(index, qcs.into_iter().map(|q| Row { mu: mu.clone(), sign: Sign::Plus, qcs: q }).collect())
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn modes(&self) -> usize {
        self.rows[0].qcs.modes()
    }

    pub fn support(&self) -> impl Iterator<Item = &OccupationVector> {
        self.rows.iter().map(|r| &r.qcs)
    }

    pub fn is_balanced(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].mu == w[1].mu)
    }

    pub fn has_negative_amplitudes(&self) -> bool {
        self.rows.iter().any(|r| r.sign == Sign::Minus)
    }

    /// Rows as an `N_l × m` matrix of occupations.
    pub fn matrix(&self) -> Vec<Vec<u32>> {
        self.rows.iter().map(|r| r.qcs.occupations().to_vec()).collect()
    }

    pub fn state(&self) -> Result<PureState> {
        let mut psi = PureState::new();
        for r in &self.rows {
            psi.add_constant(r.qcs.clone(), r.amplitude()?);
        }
        Ok(psi)
    }
}

/// A set of codewords plus the design number of correctable losses.
///
/// Orthogonality is not enforced here; that is what the criteria check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    pub name: String,
    pub design_t: u32,
    codewords: Vec<Codeword>,
}

impl Code {
    pub fn new(name: impl Into<String>, design_t: u32, codewords: Vec<Codeword>) -> Result<Self> {
        let Some(first) = codewords.first() else {
            return Err(Error::EmptyCode);
        };
        let m = first.modes();
        if let Some(c) = codewords.iter().find(|c| c.modes() != m) {
            return Err(Error::LengthMismatch { left: m, right: c.modes() });
        }
        Ok(Self { name: name.into(), design_t, codewords })
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn modes(&self) -> usize {
        self.codewords[0].modes()
    }

    /// `N`, the largest row sum.
    pub fn total_photons(&self) -> u32 {
        self.all_rows().map(|r| r.qcs.row_sum()).max().unwrap_or(0)
    }

    pub fn has_equal_row_sums(&self) -> bool {
        let n = self.total_photons();
        self.all_rows().all(|r| r.qcs.row_sum() == n)
    }

    pub fn is_balanced(&self) -> bool {
        self.codewords.iter().all(Codeword::is_balanced)
    }

    pub fn has_negative_amplitudes(&self) -> bool {
        self.codewords.iter().any(Codeword::has_negative_amplitudes)
    }

    fn all_rows(&self) -> impl Iterator<Item = &Row> {
        self.codewords.iter().flat_map(|c| c.rows.iter())
    }

    /// Minimum distance between QCS of different codewords, `None` for a
    /// single codeword.
    pub fn min_distance(&self) -> Option<Rational> {
        let mut best: Option<u64> = None;
        for (i, a) in self.codewords.iter().enumerate() {
            for b in &self.codewords[i + 1..] {
                for u in a.support() {
                    for v in b.support() {
                        let d = l1_distance(u, v);
                        best = Some(best.map_or(d, |x| x.min(d)));
                    }
                }
            }
        }
        best.map(|d| Rational::new(BigInt::from(d), BigInt::from(2)))
    }

    /// `[[N, m, 2^k, d]]`.
    pub fn descriptor(&self) -> String {
        let d = self.min_distance().map_or_else(|| "-".to_string(), |d| d.to_string());
        format!("[[{},{},{},{}]]", self.total_photons(), self.modes(), self.codewords.len(), d)
    }
}

/// Non-fatal observations made while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseWarning {
    UnequalRowSums,
    HeaderMismatch { field: &'static str, declared: String, actual: String },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::UnequalRowSums => write!(f, "row sums differ; N taken as the largest"),
            ParseWarning::HeaderMismatch { field, declared, actual } => {
                write!(f, "header {field}={declared} but the code has {field}={actual}")
            }
        }
    }
}

pub fn parse_code(text: &str) -> Result<Code> {
    parse_code_with_warnings(text).map(|(c, _)| c)
}

pub fn parse_code_with_warnings(text: &str) -> Result<(Code, Vec<ParseWarning>)> {
    let mut header: Option<Header> = None;
    let mut words: Vec<(usize, usize, Vec<Row>)> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        if header.is_none() {
            header = Some(parse_header(line).map_err(err)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("word") {
            let index: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(format!("expected `word <index>`, found {line:?}")))?;
            if index != words.len() {
                return Err(err(format!("expected word {}, found word {index}", words.len())));
            }
            words.push((index, line_no, Vec::new()));
            continue;
        }
        let Some((_, _, rows)) = words.last_mut() else {
            return Err(err("row before any `word` line".to_string()));
        };
        rows.push(parse_row(line).map_err(err)?);
    }
    let header = header.ok_or(Error::Parse { line: last_line.max(1), message: "missing `code` header".into() })?;
    let mut codewords = Vec::with_capacity(words.len());
    for (index, line, rows) in words {
        if let Some(r) = rows.iter().find(|r| r.qcs.modes() != header.m) {
            return Err(Error::Parse {
                line,
                message: format!("codeword {index}: QCS {} has {} modes, header says m={}", r.qcs, r.qcs.modes(), header.m),
            });
        }
        codewords.push(Codeword::new(index, rows)?);
    }
    let code = Code::new(header.name, header.t, codewords)?;
    let mut warnings = Vec::new();
    if !code.has_equal_row_sums() {
        warnings.push(ParseWarning::UnequalRowSums);
    }
    if header.n != code.total_photons() {
        warnings.push(ParseWarning::HeaderMismatch {
            field: "N",
            declared: header.n.to_string(),
            actual: code.total_photons().to_string(),
        });
    }
    let actual_d = code.min_distance().unwrap_or_else(Rational::zero);
    if header.d != actual_d {
        warnings.push(ParseWarning::HeaderMismatch {
            field: "d",
            declared: header.d.to_string(),
            actual: actual_d.to_string(),
        });
    }
    Ok((code, warnings))
}

struct Header {
    n: u32,
    m: usize,
    t: u32,
    d: Rational,
    name: String,
}

fn parse_header(line: &str) -> std::result::Result<Header, String> {
    let rest = line
        .strip_prefix("code")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| format!("expected `code N=.. m=.. t=.. d=.. name=\"..\"`, found {line:?}"))?;
    let (fields, name) = match rest.find("name=") {
        Some(pos) => {
            let quoted = rest[pos + 5..].trim();
            let name = quoted
                .strip_prefix('"')
                .and_then(|q| q.strip_suffix('"'))
                .ok_or_else(|| "name must be a double-quoted string".to_string())?;
            (&rest[..pos], name.to_string())
        }
        None => return Err("missing name=\"...\"".into()),
    };
    let (mut n, mut m, mut t, mut d) = (None, None, None, None);
    for tok in fields.split_whitespace() {
        let (key, value) = tok.split_once('=').ok_or_else(|| format!("malformed field {tok:?}"))?;
        let bad = || format!("bad value for {key}: {value:?}");
        match key {
            "N" => n = Some(value.parse::<u32>().map_err(|_| bad())?),
            "m" => m = Some(value.parse::<usize>().map_err(|_| bad())?),
            "t" => t = Some(value.parse::<u32>().map_err(|_| bad())?),
            "d" => d = Some(parse_rational(value).map_err(|_| bad())?),
            other => return Err(format!("unknown header field {other:?}")),
        }
    }
    let missing = |f: &str| format!("header is missing {f}=");
    let m = m.ok_or_else(|| missing("m"))?;
    if m == 0 {
        return Err("m must be at least 1".into());
    }
    Ok(Header {
        n: n.ok_or_else(|| missing("N"))?,
        m,
        t: t.ok_or_else(|| missing("t"))?,
        d: d.ok_or_else(|| missing("d"))?,
        name,
    })
}

fn parse_row(line: &str) -> std::result::Result<Row, String> {
    let (lhs, rhs) = line
        .split_once(':')
        .ok_or_else(|| format!("expected `<sign> <mu> : <n1> ... <nm>`, found {line:?}"))?;
    let mut lhs = lhs.split_whitespace();
    let sign = match lhs.next() {
        Some("+") => Sign::Plus,
        Some("-") => Sign::Minus,
        other => return Err(format!("expected sign + or -, found {other:?}")),
    };
    let mu_tok = lhs.next().ok_or("missing weight")?;
    if lhs.next().is_some() {
        return Err(format!("unexpected tokens before ':' in {line:?}"));
    }
    let mu = parse_rational(mu_tok).map_err(|_| format!("bad weight {mu_tok:?}"))?;
    let occupations = rhs
        .split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| format!("bad occupation {t:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if occupations.is_empty() {
        return Err("row has no occupations".into());
    }
    Ok(Row { mu, sign, qcs: OccupationVector::new(occupations) })
}

/// Canonical text: codewords in order, rows ascending by QCS.
pub fn serialize_code(code: &Code) -> String {
    let mut out = String::new();
    let d = code.min_distance().unwrap_or_else(Rational::zero);
    let _ = writeln!(
        out,
        "code N={} m={} t={} d={} name=\"{}\"",
        code.total_photons(),
        code.modes(),
        code.design_t,
        d,
        code.name
    );
    for (i, w) in code.codewords().iter().enumerate() {
        let _ = writeln!(out, "word {i}");
        for r in w.rows() {
            let _ = write!(out, "{} {}/{} :", r.sign.symbol(), r.mu.numer(), r.mu.denom());
            for n in r.qcs.occupations() {
                let _ = write!(out, " {n}");
            }
            out.push('\n');
        }
    }
    out
}

/// QCS supports of several codewords, for the weight solver.
///
/// ```text
/// word 0
/// 9 0
/// 3 6
/// word 1
/// 0 9
/// 6 3
/// ```
pub fn parse_supports(text: &str) -> Result<Vec<Vec<OccupationVector>>> {
    let mut words: Vec<Vec<OccupationVector>> = Vec::new();
    let mut modes = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        if line.starts_with("word") {
            words.push(Vec::new());
            continue;
        }
        let current = words.last_mut().ok_or_else(|| err("row before any `word` line".into()))?;
        let occ = line
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| err(format!("bad occupation {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if *modes.get_or_insert(occ.len()) != occ.len() {
            return Err(err(format!("expected {} modes, found {}", modes.unwrap_or(0), occ.len())));
        }
        current.push(OccupationVector::new(occ));
    }
    if words.is_empty() || words.iter().any(Vec::is_empty) {
        return Err(Error::EmptyCode);
    }
    for (i, w) in words.iter().enumerate() {
        let distinct: BTreeSet<_> = w.iter().collect();
        if distinct.len() != w.len() {
            let dup = w.iter().find(|q| w.iter().filter(|p| p == q).count() > 1).cloned();
            return Err(Error::DuplicateQcs { codeword: i, qcs: dup.unwrap_or_default() });
        }
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{integer, rational};
    use proptest::prelude::*;

    const EXAMPLE_ONE: &str = "code N=4 m=2 t=1 d=2 name=\"example-1\"\n\
        word 0\n+ 1/2 : 0 4\n+ 1/2 : 4 0\nword 1\n+ 1/1 : 2 2\n";

    #[test]
    fn parse_example_one() {
        let (code, warnings) = parse_code_with_warnings(EXAMPLE_ONE).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        assert_eq!(code.descriptor(), "[[4,2,2,2]]");
        assert_eq!(code.design_t, 1);
        let w0 = &code.codewords()[0];
        assert_eq!(w0.rows(), &[
            Row::new(rational(1, 2), Sign::Plus, [0, 4]),
            Row::new(rational(1, 2), Sign::Plus, [4, 0]),
        ]);
        assert_eq!(code.codewords()[1].rows(), &[Row::new(integer(1), Sign::Plus, [2, 2])]);
        assert!(code.is_balanced());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\n\ncode N=4 m=2 t=1 d=2 name=\"x y\"  # trailing\nword 0\n+ 1/2 : 0 4 # row\n+ 1/2 : 4 0\nword 1\n+ 1/1 : 2 2\n";
        let code = parse_code(text).unwrap();
        assert_eq!(code.name, "x y");
    }

    #[test]
    fn normalization_error_names_codeword() {
        let text = "code N=2 m=2 t=0 d=1 name=\"bad\"\nword 0\n+ 1/3 : 2 0\n+ 1/3 : 0 2\n";
        assert_eq!(parse_code(text).unwrap_err(), Error::Normalization { codeword: 0, sum: "2/3".into() });
    }

    #[test]
    fn duplicate_qcs_is_structural_error() {
        let text = "code N=2 m=2 t=0 d=1 name=\"dup\"\nword 0\n+ 1/2 : 2 0\n+ 1/2 : 2 0\n";
        assert!(matches!(parse_code(text), Err(Error::DuplicateQcs { codeword: 0, .. })));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            ("code N=4 m=2 t=1 d=2\n", 1),
            ("code N=4 m=2 t=1 d=2 name=\"a\"\n+ 1/1 : 2 2\n", 2),
            ("code N=4 m=2 t=1 d=2 name=\"a\"\nword 0\n* 1/1 : 2 2\n", 3),
            ("code N=4 m=2 t=1 d=2 name=\"a\"\nword 0\n+ 1/1 : 2 x\n", 3),
            ("code N=4 m=2 t=1 d=2 name=\"a\"\nword 0\n+ 1/1 : 2 2 0\n", 2),
            ("code N=4 m=2 t=1 d=2 name=\"a\"\nword 1\n", 2),
        ];
        for (text, line) in cases {
            match parse_code(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn header_mismatch_and_unequal_sums_warn() {
        let text = "code N=5 m=2 t=0 d=3 name=\"w\"\nword 0\n+ 1/1 : 1 1\nword 1\n+ 1/1 : 4 0\n";
        let (code, warnings) = parse_code_with_warnings(text).unwrap();
        assert_eq!(code.total_photons(), 4);
        assert!(warnings.contains(&ParseWarning::UnequalRowSums));
        assert!(warnings.iter().any(|w| matches!(w, ParseWarning::HeaderMismatch { field: "N", .. })));
        assert!(warnings.iter().any(|w| matches!(w, ParseWarning::HeaderMismatch { field: "d", .. })));
    }

    #[test]
    fn serialize_sorts_rows_and_round_trips() {
        let w = Codeword::new(0, vec![
            Row::new(rational(1, 2), Sign::Plus, [4, 0]),
            Row::new(rational(1, 2), Sign::Minus, [0, 4]),
        ])
        .unwrap();
        let code = Code::new("s", 1, vec![w, Codeword::uniform(1, [[2u32, 2].into()]).unwrap()]).unwrap();
        let text = serialize_code(&code);
        assert_eq!(text, "code N=4 m=2 t=1 d=2 name=\"s\"\nword 0\n- 1/2 : 0 4\n+ 1/2 : 4 0\nword 1\n+ 1/1 : 2 2\n");
        assert_eq!(parse_code(&text).unwrap(), code);
        assert_eq!(parse_code(EXAMPLE_ONE).map(|c| serialize_code(&c)).unwrap(), EXAMPLE_ONE);
    }

    #[test]
    fn empty_code_rejected() {
        assert_eq!(Code::new("e", 0, vec![]).unwrap_err(), Error::EmptyCode);
        assert!(matches!(parse_code("code N=0 m=1 t=0 d=0 name=\"e\"\n"), Err(Error::EmptyCode)));
    }

    #[test]
    fn supports_format() {
        let s = parse_supports("word 0\n9 0\n3 6\nword 1\n0 9\n6 3\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1][1], OccupationVector::from([6, 3]));
        assert!(parse_supports("word 0\n1 2\n1 2\n").is_err());
        assert!(parse_supports("word 0\n1 2\n1 2 3\n").is_err());
    }

    fn random_code() -> impl Strategy<Value = Code> {
        (1usize..4, 1usize..4).prop_flat_map(|(m, words)| {
            let word = proptest::collection::btree_map(
                proptest::collection::vec(0u32..7, m),
                (1i64..9, any::<bool>()),
                1..4,
            );
            (proptest::collection::vec(word, words), 0u32..3).prop_map(move |(ws, t)| {
                let codewords = ws
                    .into_iter()
                    .enumerate()
                    .map(|(i, rows)| {
                        let total: i64 = rows.values().map(|(w, _)| w).sum();
                        let rows = rows
                            .into_iter()
                            .map(|(q, (w, neg))| {
                                Row::new(rational(w, total), if neg { Sign::Minus } else { Sign::Plus }, OccupationVector::new(q))
                            })
                            .collect();
                        Codeword::new(i, rows).unwrap()
                    })
                    .collect();
                Code::new("random", t, codewords).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn parse_serialize_round_trip(code in random_code()) {
            let text = serialize_code(&code);
            prop_assert_eq!(parse_code(&text).unwrap(), code);
        }
    }
}
